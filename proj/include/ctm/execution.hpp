#pragma once

namespace ctm {

/// Selects the serial reference path or the OpenMP path of a kernel.
/// Auto picks OpenMP only when the problem is large enough to amortise
/// the fork/join.
enum class Execution { Serial, Parallel, Auto };

}  // namespace ctm
