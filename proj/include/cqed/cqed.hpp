// cqed.hpp — umbrella header

#pragma once

#include "cqed/params.hpp"
#include "cqed/transfer.hpp"
#include "cqed/spectrum.hpp"
#include "cqed/roots.hpp"
#include "cqed/resonance.hpp"
#include "cqed/linalg.hpp"
#include "cqed/oracle.hpp"
#include "cqed/simplex.hpp"
#include "cqed/fit.hpp"

namespace cqed {
inline constexpr const char* version = "0.1.0";
}
