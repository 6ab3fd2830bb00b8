#pragma once

// Seeded generators for random states, unitaries and Hermitian matrices.

#include <cstdint>
#include <random>

#include "qmath.hpp"

namespace repeaterlab {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream) pairs; used to split one seed across parallel runs.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

inline ComplexMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, Rng &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (auto &z : m.data()) {
        z = {n(rng), n(rng)};
    }
    return m;
}

/// Haar-distributed unitary: Gram-Schmidt QR of a Ginibre matrix (phases of R absorbed).
inline ComplexMatrix random_unitary(std::size_t n, Rng &rng) {
    ComplexMatrix q = random_gaussian_matrix(n, n, rng);
    for (std::size_t k = 0; k < n; ++k) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < k; ++j) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    proj += std::conj(q(i, j)) * q(i, k);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    q(i, k) -= proj * q(i, j);
                }
            }
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nrm += std::norm(q(i, k));
        }
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) {
            q(i, k) /= nrm;
        }
    }
    return q;
}

inline Ket random_ket(std::size_t dim, Rng &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Ket k(dim);
    for (auto &z : k.amplitudes()) {
        z = {n(rng), n(rng)};
    }
    return k.normalized();
}

inline ComplexMatrix random_hermitian(std::size_t n, Rng &rng) {
    const ComplexMatrix g = random_gaussian_matrix(n, n, rng);
    ComplexMatrix h = g + g.adjoint();
    h *= 0.5;
    return h;
}

/// Random density matrix of the given rank (rank == n gives full support almost surely).
inline ComplexMatrix random_density(std::size_t n, std::size_t rank, Rng &rng) {
    const ComplexMatrix g = random_gaussian_matrix(n, rank, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho *= 1.0 / rho.trace().real();
    return rho;
}

} // namespace repeaterlab
