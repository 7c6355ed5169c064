// Doctest glue over the shared oracles.
#pragma once

#include <doctest.h>

#include "oracles.hpp"

namespace doctest {
template <>
struct StringMaker<noteg::TraceFrame> {
  static String convert(const noteg::TraceFrame& f) {
    return (f.fn + "@" + f.cell_id + ":" + std::to_string(f.line) + ":" + std::to_string(f.col)).c_str();
  }
};
}  // namespace doctest
