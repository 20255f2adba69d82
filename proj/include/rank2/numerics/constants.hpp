#pragma once

#include <mpfr.h>

#include "rank2/numerics/big.hpp"

namespace rank2 {

/// pi at ctx.bits() precision (MPFR's correctly rounded constant).
inline BigReal constant_pi(const PrecisionContext& ctx) {
  BigReal out(ctx.bits());
  mpfr_const_pi(out.get(), MPFR_RNDN);
  return out;
}

/// zeta(3), correctly rounded.
inline BigReal constant_zeta3(const PrecisionContext& ctx) {
  BigReal out(ctx.bits());
  mpfr_zeta_ui(out.get(), 3, MPFR_RNDN);
  return out;
}

/// 2 pi i.
inline BigComplex two_pi_i(const PrecisionContext& ctx) { return imaginary(constant_pi(ctx) * 2); }

}  // namespace rank2
