#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

namespace depol {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Two-mode state truncated at n_max total photons, stored as a map from the
// ordered block pair (N, N') to the (N+1) x (N'+1) matrix rho_{N,N'} in the
// |N,k> basis with k ascending (k = photons in the + mode). Absent entries
// are zero blocks.
struct TwoModeState {
    int n_max = 0;
    std::map<std::pair<int, int>, Mat> blocks;
    // Weight discarded by coherent-state truncation (metadata; the stored
    // state is renormalized to unit trace).
    double discarded_weight = 0.0;

    const Mat* find(int N, int Np) const {
        auto it = blocks.find({N, Np});
        return it == blocks.end() ? nullptr : &it->second;
    }

    Mat& at(int N, int Np) {
        auto it = blocks.find({N, Np});
        if (it != blocks.end()) return it->second;
        return blocks.emplace(std::make_pair(N, Np), Mat::Zero(N + 1, Np + 1))
            .first->second;
    }

    double trace() const {
        double tr = 0.0;
        for (const auto& [key, m] : blocks)
            if (key.first == key.second) tr += m.trace().real();
        return tr;
    }

    // Dense matrix over the direct sum of blocks 0..n_max (dimension
    // (n_max+1)(n_max+2)/2), used for positivity checks.
    Mat assemble() const;

    // Largest Hermiticity violation max ||rho_{N',N} - rho_{N,N'}^dag||.
    double hermiticity_defect() const;
};

// Tr(rho O) for a block observable O whose block O_N maps block N to block
// N+offset; offset = 0 for block-preserving observables such as the Stokes
// matrices, offset = -1 for mode amplitudes.
cplx expectation(const TwoModeState& state, int offset,
                 const std::function<Mat(int)>& op_block);

inline cplx expectation(const TwoModeState& state,
                        const std::function<Mat(int)>& op_block) {
    return expectation(state, 0, op_block);
}

}  // namespace depol
