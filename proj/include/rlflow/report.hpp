#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "rlflow/models.hpp"

namespace rlflow {

// Side-by-side model table: one row per coefficient, one column per model,
// cells "estimate*** (se)", followed by fit statistics rows.
void write_model_table(std::ostream& out, const std::vector<std::string>& model_labels,
                       const std::vector<ModelFit>& fits);

void write_tests(std::ostream& out, const std::vector<TestResult>& tests);

// "1.234***" with the given number of decimals.
std::string starred(double estimate, double p, int decimals = 3);

}  // namespace rlflow
