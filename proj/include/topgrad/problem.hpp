#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "topgrad/control_law.hpp"
#include "topgrad/fem.hpp"

namespace topgrad {

/// Closed-form desired state. Tags keep problem definitions serializable.
struct YdSpec {
    enum class Tag { constant, wave_product };
    Tag tag = Tag::constant;
    double value = 0.0;  // for constant

    double operator()(double x1, double x2) const {
        switch (tag) {
            case Tag::constant:
                return value;
            case Tag::wave_product:
                return 10.0 * x1 * std::sin(5.0 * x1) * std::cos(7.0 * x2);
        }
        return 0.0;
    }

    static YdSpec constant(double v) { return {Tag::constant, v}; }
    static YdSpec wave_product() { return {Tag::wave_product, 0.0}; }
};

/// Full problem definition: PDE, control cost, support cost beta (the
/// binary law stores nu here) and desired state.
struct ProblemSpec {
    PdeKind pde = PdeKind::dirichlet_laplace;
    ControlLaw law;
    double beta = 0.01;
    std::optional<std::vector<double>> beta_field;  // per-cell override
    YdSpec yd;
    Rectangle domain;
    std::string preset_name;

    double beta_at(int cell) const { return beta_field ? (*beta_field)[cell] : beta; }

    void validate() const {
        if (beta_field) {
            for (double b : *beta_field) {
                if (!(b >= 0.0)) throw std::invalid_argument("problem: beta must be >= 0");
            }
        } else if (!(beta >= 0.0)) {
            throw std::invalid_argument("problem: beta must be >= 0");
        }
    }
};

}  // namespace topgrad
