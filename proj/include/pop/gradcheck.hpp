#ifndef POP_GRADCHECK_HPP_
#define POP_GRADCHECK_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "pop/pipeline_model.hpp"
#include "pop/pop_model.hpp"
#include "pop/rng.hpp"

namespace pop {

struct GradcheckTrial {
	std::string description;
	double max_rel_error = 0.0;
	std::size_t parameters = 0;
};

struct GradcheckReport {
	std::vector<GradcheckTrial> trials;
	double max_rel_error() const;
	bool passed(double tolerance) const { return max_rel_error() < tolerance; }
};

/// Largest relative error between backward() and central differences of loss() over all parameters.
double check_pop_gradient(const PopParams& params, const EncodedAct& act, double h = 1e-5);
double check_pipeline_gradient(const PipelineParams& params, const Triple& triple, double margin, double h = 1e-5);

/**
 * Random small PoP instances: n cycles through 2..5, gold cycles through
 * point / miss / mult, bias and sensor-nonlinearity switches vary.
 * Parameters are drawn uniform in (-1, 1) so every pathway is active.
 */
GradcheckReport gradcheck_pop(std::size_t trials, Rng& rng, double h = 1e-5);
/// Random hinge triples with margins in [0.5, 2.5).
GradcheckReport gradcheck_pipeline(std::size_t trials, Rng& rng, double h = 1e-5);

} // namespace pop

#endif
