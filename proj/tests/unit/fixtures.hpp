#pragma once

#include <string>

#include "lbmlab/model.hpp"

namespace fixtures {

// A generic admissible parameter set for each model, with all rates distinct.
inline lbmlab::Model sample_model(const std::string& name, lbmlab::ParamMap extra = {}) {
  lbmlab::ParamMap params, rates;
  if (name == "D2Q5") {
    params = {{"alpha", -1.0}};
    rates = {{"s1", 1.3}, {"s3", 1.1}, {"s4", 0.9}};
  } else if (name == "D2Q9-AD") {
    params = {{"alpha", -2.0}, {"beta", 1.0}, {"d1", -1.0}, {"a", 0.5}};
    rates = {{"s1", 1.3}, {"s3", 1.1}, {"s4", 0.9}, {"s6", 1.2}, {"s8", 1.4}};
  } else if (name == "D2Q9-NS") {
    params = {{"alpha", -2.0}, {"beta", 1.0}};
    rates = {{"s3", 1.1}, {"s4", 1.3}, {"s6", 1.2}, {"s8", 1.4}};
  } else if (name == "D2Q13-NS") {
    params = {{"alpha", -2.0}, {"beta", 1.0}, {"gamma", 0.5}, {"c1", -1.0}, {"q", -7.0 / 6.0}};
    rates = {{"s3", 1.1}, {"s4", 1.3}, {"s6", 1.2}, {"s8", 1.4}, {"s10", 1.15}, {"s11", 1.25}, {"s12", 1.05}};
  } else if (name == "D3Q15-AD") {
    params = {{"alpha", -1.0}, {"beta", 1.0}, {"d1", -1.0}};
    rates = {{"s1", 1.3}, {"s5", 1.1}, {"s6", 0.9}, {"s11", 1.2}, {"s14", 1.4}, {"s15", 1.05}};
  } else if (name == "D3Q19-AD") {
    params = {{"alpha", -10.0}, {"beta", 1.0}, {"d1", -1.0}, {"d2", 0.3}};
    rates = {{"s1", 1.3}, {"s5", 1.1}, {"s6", 0.9}, {"s11", 1.2}, {"s14", 1.4}, {"s16", 1.05}, {"s17", 1.15}};
  }
  for (const auto& [k, v] : extra) {
    if (k[0] == 's') rates[k] = v;
    else params[k] = v;
  }
  return lbmlab::build_model(name, params, rates);
}

}  // namespace fixtures
