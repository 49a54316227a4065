#pragma once

#include <stdexcept>
#include <string>

namespace frenet {

// Raised when a curve fails the k-regularity test an operation needs. Carries
// the first derivative order whose wedge norm fell below the independence
// threshold.
struct NonRegularError : std::runtime_error {
    NonRegularError(int failing_order, double t)
        : std::runtime_error("curve is not " + std::to_string(failing_order) +
                             "-regular at t = " + std::to_string(t)),
          order(failing_order),
          at(t) {}
    int order;
    double at;
};

// Raised when the fundamental regularity condition of a tube fails: some
// section point has |x1 - p1| * kappa1 >= 1.
struct TubeRegularityError : std::runtime_error {
    TubeRegularityError(double t_, double extent_, double kappa1_)
        : std::runtime_error("tube regularity condition violated at t = " + std::to_string(t_) +
                             ": section extent " + std::to_string(extent_) +
                             " times kappa1 " + std::to_string(kappa1_) + " reaches 1"),
          t(t_),
          extent(extent_),
          kappa1(kappa1_) {}
    double t;
    double extent;
    double kappa1;
};

}  // namespace frenet
