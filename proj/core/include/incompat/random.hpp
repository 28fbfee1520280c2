#pragma once

// Seeded generators for random devices. Every function takes the engine by
// reference so callers control reproducibility.

#include <cstddef>
#include <random>
#include <vector>

#include "incompat/devices.hpp"

namespace incompat {

using Rng = std::mt19937_64;

/// Matrix with i.i.d. standard complex Gaussian entries.
CMatrix ginibre(std::size_t d, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
CMatrix haar_unitary(std::size_t d, Rng& rng);
/// Uniform point of the probability simplex with n entries.
std::vector<double> random_distribution(std::size_t n, Rng& rng);
/// Random Hermitian matrix with Gaussian entries.
CMatrix random_hermitian(std::size_t d, Rng& rng);
/// Random full-rank density matrix (normalized Wishart).
CMatrix random_state(std::size_t d, Rng& rng);
CVector random_unit_vector(std::size_t d, Rng& rng);

Povm random_povm(std::size_t d, std::size_t outcomes, Rng& rng);
/// Random channel C^din -> C^dout from a Haar-random isometry into C^dout (x) C^rank.
ChannelChoi random_channel(std::size_t din, std::size_t dout, std::size_t kraus_rank, Rng& rng);
MarkovKernel random_kernel(std::size_t rows, std::size_t cols, Rng& rng);
/// Random instrument with the given number of outcomes.
Instrument random_instrument(std::size_t d, std::size_t outcomes, Rng& rng);

}  // namespace incompat
