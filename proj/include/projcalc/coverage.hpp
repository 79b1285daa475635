#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

namespace projcalc::coverage {

// Every public operation bumps its counter so a harness run can report
// which parts of the library it actually exercised.
enum class Op : std::size_t {
  norm_primal,
  norm_dual,
  pair,
  duality_map,
  duality_map_inv,
  smoothness,
  a_coef,
  o_part,
  a_star,
  o_star,
  in_O,
  mask_restrict,
  pos_part,
  neg_part,
  classify_region,
  project,
  variational_residual,
  classify_direction,
  frechet_apply,
  gateaux_fd,
  nonsmoothness_witness,
  coderiv_ball,
  sphere_theta_member,
  coderiv_cylinder,
  cone_theta_member,
  cone_jf_member,
  cone_interval_at_origin,
  interval_contains,
  coderiv_quotient,
  test_membership,
  gen_instance,
  count_
};

inline constexpr std::array<const char*, static_cast<std::size_t>(Op::count_)> kOpNames = {
    "norm_primal",
    "norm_dual",
    "pair",
    "duality_map",
    "duality_map_inv",
    "smoothness",
    "a_coef",
    "o_part",
    "a_star",
    "o_star",
    "in_O",
    "mask_restrict",
    "pos_part",
    "neg_part",
    "classify_region",
    "project",
    "variational_residual",
    "classify_direction",
    "frechet_apply",
    "gateaux_fd",
    "nonsmoothness_witness",
    "coderiv_ball",
    "sphere_theta_member",
    "coderiv_cylinder",
    "cone_theta_member",
    "cone_jf_member",
    "cone_interval_at_origin",
    "interval_contains",
    "coderiv_quotient",
    "test_membership",
    "gen_instance",
};

inline std::array<std::atomic<std::uint64_t>, static_cast<std::size_t>(Op::count_)>& counters() {
  static std::array<std::atomic<std::uint64_t>, static_cast<std::size_t>(Op::count_)> c{};
  return c;
}

inline void touch(Op op) {
  counters()[static_cast<std::size_t>(op)].fetch_add(1, std::memory_order_relaxed);
}

inline void reset() {
  for (auto& c : counters()) c.store(0, std::memory_order_relaxed);
}

inline std::map<std::string, std::uint64_t> snapshot() {
  std::map<std::string, std::uint64_t> out;
  for (std::size_t i = 0; i < kOpNames.size(); ++i)
    out[kOpNames[i]] = counters()[i].load(std::memory_order_relaxed);
  return out;
}

}  // namespace projcalc::coverage
