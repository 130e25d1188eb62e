#pragma once

#include <span>

namespace hydrolstm {

/// Nash-Sutcliffe efficiency, 1 - sum((sim - obs)^2) / sum((obs - mean(obs))^2), over one full sequence.
/// Range (-inf, 1]. Throws LengthMismatch (lengths differ or < 2) or ConstantObservations.
double nse(std::span<const double> simulated, std::span<const double> observed);

}  // namespace hydrolstm
