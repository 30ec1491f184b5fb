#pragma once
// Samplers for the continuum limit objects: the normalized Brownian
// excursion, the finite-variance limit height process, the Brownian snake
// endpoint process over a given lifetime grid, and two-point distances of
// the resulting cactus.
#include <cstdint>
#include <vector>

#include "cactus/rng.hpp"

namespace cactus {

// standard normalized Brownian excursion on the grid k/N, k = 0..N:
// Gaussian bridge increments, then the Vervaat rotation at the argmin
std::vector<double> sample_brownian_excursion(size_t N, Rng& rng);

// limit of the rescaled height process in the finite-variance case:
// sqrt(2) times the normalized excursion
std::vector<double> sample_limit_height(size_t N, Rng& rng);

// Brownian snake endpoint over the lifetime grid h (times k/N): exact
// finite-dimensional law, Cov(w_j, w_k) = min h over [j, k]; an ancestral
// stack of (level, value) knots with Brownian-bridge refinement on descents
std::vector<double> sample_snake_endpoint(const std::vector<double>& h, Rng& rng);

// one two-point distance of the Brownian cactus: snake pseudometric between
// two independent uniform grid times over a freshly sampled (height, snake)
double sample_cactus_two_point(size_t N, Rng& rng);

}  // namespace cactus
