#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "gbsc/gaussian_state.hpp"

namespace gbsc {

// Haar-random unitary: QR of a complex Gaussian matrix, with the R
// diagonal phases folded into Q so the distribution is exactly Haar.
inline Eigen::MatrixXcd haar_unitary(int modes, std::uint64_t seed) {
    if (modes < 1) throw std::invalid_argument("haar_unitary: modes must be >= 1");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXcd a(modes, modes);
    for (int j = 0; j < modes; ++j)
        for (int k = 0; k < modes; ++k)
            a(j, k) = std::complex<double>(dist(gen), dist(gen));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < modes; ++k) {
        std::complex<double> d = r(k, k);
        q.col(k) *= d / std::abs(d);
    }
    return q;
}

// An M-mode interferometer: an explicit unitary, or a Haar seed it was
// generated from (kept for reproducible serialization).
struct InterferometerSpec {
    Eigen::MatrixXcd unitary;
    std::optional<std::uint64_t> haar_seed;

    static InterferometerSpec identity(int modes) {
        return {Eigen::MatrixXcd::Identity(modes, modes), std::nullopt};
    }
    static InterferometerSpec from_matrix(Eigen::MatrixXcd u) {
        InterferometerSpec spec{std::move(u), std::nullopt};
        spec.validate();
        return spec;
    }
    static InterferometerSpec haar(int modes, std::uint64_t seed) {
        return {haar_unitary(modes, seed), seed};
    }

    int modes() const { return static_cast<int>(unitary.rows()); }

    void validate() const {
        if (unitary.rows() != unitary.cols())
            throw std::invalid_argument("interferometer: matrix is not square");
        Eigen::MatrixXcd gram = unitary.adjoint() * unitary;
        double dev = (gram - Eigen::MatrixXcd::Identity(modes(), modes()))
                         .cwiseAbs()
                         .maxCoeff();
        if (dev > 1e-9)
            throw std::invalid_argument("interferometer: matrix is not unitary");
    }
};

inline GaussianState apply_interferometer(const GaussianState& state,
                                          const InterferometerSpec& spec) {
    if (spec.modes() != state.modes)
        throw std::invalid_argument("apply_interferometer: dimension mismatch");
    Eigen::MatrixXd o = interferometer_symplectic(spec.unitary);
    return {state.modes, o * state.cov * o.transpose()};
}

// JSON schema: {"re": [[...]], "im": [[...]]} or
// {"haar_seed": <u64>, "modes": M}.
inline void to_json(nlohmann::json& j, const InterferometerSpec& spec) {
    if (spec.haar_seed) {
        j = {{"haar_seed", *spec.haar_seed}, {"modes", spec.modes()}};
        return;
    }
    const int m = spec.modes();
    std::vector<std::vector<double>> re(m, std::vector<double>(m));
    std::vector<std::vector<double>> im(m, std::vector<double>(m));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            re[r][c] = spec.unitary(r, c).real();
            im[r][c] = spec.unitary(r, c).imag();
        }
    j = {{"re", re}, {"im", im}};
}

inline void from_json(const nlohmann::json& j, InterferometerSpec& spec) {
    if (j.contains("haar_seed")) {
        spec = InterferometerSpec::haar(j.at("modes").get<int>(),
                                        j.at("haar_seed").get<std::uint64_t>());
        return;
    }
    auto re = j.at("re").get<std::vector<std::vector<double>>>();
    auto im = j.at("im").get<std::vector<std::vector<double>>>();
    const int m = static_cast<int>(re.size());
    if (static_cast<int>(im.size()) != m)
        throw std::invalid_argument("interferometer: re/im shape mismatch");
    Eigen::MatrixXcd u(m, m);
    for (int r = 0; r < m; ++r) {
        if (static_cast<int>(re[r].size()) != m ||
            static_cast<int>(im[r].size()) != m)
            throw std::invalid_argument("interferometer: ragged matrix rows");
        for (int c = 0; c < m; ++c) u(r, c) = {re[r][c], im[r][c]};
    }
    spec = InterferometerSpec::from_matrix(std::move(u));
}

}  // namespace gbsc
