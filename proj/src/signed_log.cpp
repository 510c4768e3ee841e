#include "kmig/signed_log.hpp"

#include <algorithm>

namespace kmig {

SignedLogValue operator+(SignedLogValue a, SignedLogValue b) noexcept {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.log_magnitude < b.log_magnitude) std::swap(a, b);
  const double ratio = std::exp(b.log_magnitude - a.log_magnitude);
  if (a.sign == b.sign) {
    return {a.log_magnitude + std::log1p(ratio), a.sign};
  }
  if (ratio == 1.0) return {};
  return {a.log_magnitude + std::log1p(-ratio), a.sign};
}

void LogAccumulator::add(SignedLogValue term) noexcept {
  if (term.sign == 0) return;
  if (term.log_magnitude > scale_) {
    if (scale_ != -std::numeric_limits<double>::infinity()) {
      const double factor = std::exp(scale_ - term.log_magnitude);
      positive_.scale(factor);
      negative_.scale(factor);
    }
    scale_ = term.log_magnitude;
  }
  const double linear = std::exp(term.log_magnitude - scale_);
  if (term.sign > 0) {
    positive_.add(linear);
  } else {
    negative_.add(linear);
  }
}

SignedLogValue LogAccumulator::result() const noexcept {
  if (scale_ == -std::numeric_limits<double>::infinity()) return {};
  const double diff = positive_.value() - negative_.value();
  if (diff == 0.0) return {};
  return {scale_ + std::log(std::fabs(diff)), diff > 0.0 ? 1 : -1};
}

double LogAccumulator::log_abs_sum() const noexcept {
  if (scale_ == -std::numeric_limits<double>::infinity()) return scale_;
  return scale_ + std::log(positive_.value() + negative_.value());
}

}  // namespace kmig
