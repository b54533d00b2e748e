#ifndef ERW_PERSIST_HPP_
#define ERW_PERSIST_HPP_

#include <iosfwd>
#include <string>

#include "erw/experiment.hpp"

namespace erw::harness {

/// Decimal with 17 significant digits.
std::string format_real(double x);

/// `replica,value,censored,steps`, one row per record, LF line endings.
void write_samples_csv(std::ostream& out, const ExperimentSummary& summary);

/// Summary as a JSON document. Non-finite reals are written as null.
std::string summary_json(const ExperimentSummary& summary);

/// Writes samples.csv, summary.json and the kind's plot table under `dir`
/// (created if missing). Returns the summary path. Throws
/// std::runtime_error on I/O failure.
std::string write_outputs(const ExperimentSummary& summary, const std::string& dir);

}  // namespace erw::harness

#endif  // ERW_PERSIST_HPP_
