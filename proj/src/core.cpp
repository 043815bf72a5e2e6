#include "depol/core.hpp"

namespace depol {

Mat TwoModeState::assemble() const {
    // Offset of block N inside the direct sum.
    auto base = [](int N) { return N * (N + 1) / 2; };
    const int dim = base(n_max) + n_max + 1;
    Mat full = Mat::Zero(dim, dim);
    for (const auto& [key, m] : blocks) {
        const auto [N, Np] = key;
        full.block(base(N), base(Np), N + 1, Np + 1) = m;
    }
    return full;
}

double TwoModeState::hermiticity_defect() const {
    double worst = 0.0;
    for (const auto& [key, m] : blocks) {
        const auto [N, Np] = key;
        const Mat* mirror = find(Np, N);
        const Mat diff = mirror ? Mat(m - mirror->adjoint()) : m;
        worst = std::max(worst, diff.norm());
    }
    return worst;
}

cplx expectation(const TwoModeState& state, int offset,
                 const std::function<Mat(int)>& op_block) {
    cplx total = 0.0;
    for (const auto& [key, rho] : state.blocks) {
        const auto [N, Np] = key;
        if (Np != N + offset) continue;
        const Mat op = op_block(N);
        if (op.rows() != Np + 1 || op.cols() != N + 1)
            throw std::invalid_argument(
                "expectation: observable block dimension mismatch");
        total += (rho * op).trace();
    }
    return total;
}

}  // namespace depol
