#pragma once

#include <cmath>

namespace ctm {

enum class SigmoidKind { Tanh };

/// Smooth odd saturating coupling S with S'(0)=1 and sgn S''(x) = -sgn x.
///
/// Only tanh is provided. Dynamics code goes through this type so that the
/// coupling is never hard-coded; the closed-form pitchfork analysis accepts
/// tanh only.
struct Sigmoid {
    SigmoidKind kind = SigmoidKind::Tanh;

    /// S(x). Throws std::domain_error for non-finite x.
    double value(double x) const;

    /// k-th derivative, k in {1,2,3}, from closed forms. Throws UsageError
    /// for any other order and std::domain_error for non-finite x.
    double derivative(double x, int order) const;

    // Unchecked fast path for inner loops.
    double operator()(double x) const noexcept { return std::tanh(x); }
};

}  // namespace ctm
