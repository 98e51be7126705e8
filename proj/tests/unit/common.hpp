#pragma once

#include <string>

#include "repargen/model.hpp"

namespace testing {

inline repargen::Model bundled(const std::string& name) {
  return repargen::load_model(std::string(REPARGEN_MODELS_DIR) + "/" + name + ".model");
}

inline repargen::Expression E(const std::string& text) { return repargen::parse_expression(text); }

inline repargen::Symbol S(const std::string& name) { return repargen::Symbol(name); }

}  // namespace testing
