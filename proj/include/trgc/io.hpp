#ifndef TRGC_IO_HPP
#define TRGC_IO_HPP

#include "trgc/structural.hpp"
#include "trgc/types.hpp"

#include <json.hpp>
#include <string>

namespace trgc {

using Json = nlohmann::json;

/// CSV layout: optional `# key=value` comment lines, then a header row
/// `t,<col1>,<col2>[,<col3>]`, then one row per sample. Numbers use the
/// shortest representation that round-trips exactly.
void write_csv(const TimeSeries& series, const std::string& path);
TimeSeries read_csv(const std::string& path);

std::string format_double(double v);

Json model_to_json(const VarModel& model);
VarModel model_from_json(const Json& j);

Json svar_to_json(const SvarModel& svar);
SvarModel svar_from_json(const Json& j);

Json mixture_to_json(const MixtureModel& mix);
MixtureModel mixture_from_json(const Json& j);

void write_json_file(const Json& j, const std::string& path);
Json read_json_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& text, const std::string& path);

}  // namespace trgc

#endif
