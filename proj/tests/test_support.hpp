#pragma once

#include <random>

#include "qfridge/model.hpp"

namespace qfridge::testing {

// w_H = 3, w_C = 1, T = (30, 21, 18), g = gamma = 0.001 w_H.
inline ModelParams weak_coupling_params(double t_hot = 30.0) {
  ModelParams p;
  p.omega_H = 3.0;
  p.omega_C = 1.0;
  p.g = 0.003;
  p.T_H = t_hot;
  p.T_R = 21.0;
  p.T_C = 18.0;
  p.set_gamma(0.003);
  return p;
}

inline ModelParams strong_coupling_params(double t_hot = 30.0) {
  ModelParams p = weak_coupling_params(t_hot);
  p.g = 0.9;
  return p;
}

inline std::mt19937_64 seeded_rng(std::uint64_t salt = 0) {
  return std::mt19937_64(0x5eed5eedULL + salt);
}

}  // namespace qfridge::testing
