#include "ftm/zeta.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <cmath>
#include <mutex>
#include <string>

#include "ftm/errors.hpp"

namespace ftm {

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0)) throw DomainError("Hurwitz zeta requires s > 1 (got " + std::to_string(s) + ")");
  if (!(q > 0.0)) throw DomainError("Hurwitz zeta requires q > 0");
  static std::once_flag handler_off;
  std::call_once(handler_off, [] { gsl_set_error_handler_off(); });
  gsl_sf_result result;
  const int status = gsl_sf_hzeta_e(s, q, &result);
  if (status == GSL_EUNDRFLW) return 0.0;
  if (status != GSL_SUCCESS) throw NumericError(std::string("Hurwitz zeta: ") + gsl_strerror(status));
  return result.val;
}

}  // namespace ftm
