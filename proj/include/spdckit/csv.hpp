#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spdckit/interferometer.hpp"
#include "spdckit/jsa.hpp"
#include "spdckit/optimizer.hpp"
#include "spdckit/poling.hpp"

namespace spdckit::csv {

// Every emitter starts with "# schema: <name> v1" followed by a column
// header row. Values are %.17g so files regenerate byte-identically and
// parse back to the same doubles; undefined values print as nan.

std::string spectrum_csv(const JointSpectrum& js);
std::string interferogram_csv(const Interferogram& ig);
std::string domains_csv(const DomainSequence& seq);

// local poling period sampled along the device, for period-vs-z plots
std::string period_csv(const ProfileSpec& spec, std::size_t samples = 513);

std::string trace_csv(const std::vector<GenerationStat>& trace);

// creates parent directories; throws std::runtime_error when the write fails
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace spdckit::csv
