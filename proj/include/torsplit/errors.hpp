#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace torsplit {

struct Trajectory;  // splitting.hpp

/// The H^s guard detected an approach to the maximal existence time of the
/// transport sub-equation (or a non-finite state).
class GuardTripError : public std::runtime_error {
public:
    GuardTripError(std::string msg, double time_reached_, double norm_value_, double threshold_)
        : std::runtime_error(std::move(msg)),
          time_reached(time_reached_),
          norm_value(norm_value_),
          threshold(threshold_) {}

    double time_reached;
    double norm_value;
    double threshold;
};

class SubstepLimitError : public std::runtime_error {
public:
    SubstepLimitError(std::string msg, long needed_, long cap_)
        : std::runtime_error(std::move(msg)), needed(needed_), cap(cap_) {}

    long needed;
    long cap;
};

/// Thrown by evolve with the partial trajectory attached for diagnosis.
class EvolveAbortedError : public std::runtime_error {
public:
    EvolveAbortedError(std::string msg, std::shared_ptr<const Trajectory> partial_, double time_reached_,
                       double norm_value_, double threshold_)
        : std::runtime_error(std::move(msg)),
          partial(std::move(partial_)),
          time_reached(time_reached_),
          norm_value(norm_value_),
          threshold(threshold_) {}

    std::shared_ptr<const Trajectory> partial;
    double time_reached;
    double norm_value;
    double threshold;
};

/// The self-convergence certificate of a reference run is too large relative
/// to the errors under measurement; rates cannot be certified.
class ReferenceNotConvergedError : public std::runtime_error {
public:
    ReferenceNotConvergedError(std::string msg, double certificate_, double bound_)
        : std::runtime_error(std::move(msg)), certificate(certificate_), bound(bound_) {}

    double certificate;
    double bound;
};

}  // namespace torsplit
