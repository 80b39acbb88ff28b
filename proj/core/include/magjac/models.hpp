#ifndef MAGJAC_MODELS_HPP
#define MAGJAC_MODELS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magjac/chart.hpp"

namespace magjac {

/// Catalog facts about a model that the numerical layers can exploit.
struct ModelTraits {
    std::string name;
    std::map<std::string, double> params;
    int dim = 0;
    bool uniform_field = false;            // nabla J = 0 identically
    std::optional<double> J2_scalar;       // J^2 = -(value)^2 * Id when constant
    std::optional<double> const_curvature; // constant sectional curvature, when applicable
    Vec default_x, default_p;              // canonical start point for the CLI
    Vec sample_lo, sample_hi;              // box for randomized property tests
};

struct Model {
    ChartedBase base;
    ModelTraits traits;
};

/// Build a catalog model by name. Known names: flat2d, sphere2d, hyperbolic2d,
/// flat4d_kahler, flat2d_varfield. Unknown names or parameter keys raise
/// ConfigError. Parameters not given take the documented defaults.
Model make_model(const std::string& name, const std::map<std::string, double>& params = {},
                 DerivativeMode mode = DerivativeMode::Analytic);

const std::vector<std::string>& model_names();

/// One-line parameter documentation, for `list-models`.
std::string model_help(const std::string& name);

} // namespace magjac

#endif
