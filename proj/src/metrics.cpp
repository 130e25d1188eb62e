#include "hydrolstm/metrics.hpp"

#include <string>

#include "hydrolstm/error.hpp"

namespace hydrolstm {

double nse(std::span<const double> simulated, std::span<const double> observed) {
    if (simulated.size() != observed.size())
        fail(ErrorKind::LengthMismatch, "nse: " + std::to_string(simulated.size()) + " simulated vs " +
                                            std::to_string(observed.size()) + " observed values");
    if (observed.size() < 2) fail(ErrorKind::LengthMismatch, "nse needs at least two values");
    double mean = 0.0;
    for (double q : observed) mean += q;
    mean /= static_cast<double>(observed.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < observed.size(); ++t) {
        const double e = simulated[t] - observed[t];
        const double d = observed[t] - mean;
        num += e * e;
        den += d * d;
    }
    if (den == 0.0) fail(ErrorKind::ConstantObservations, "nse undefined for constant observations");
    return 1.0 - num / den;
}

}  // namespace hydrolstm
