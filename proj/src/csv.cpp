#include "spdckit/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace spdckit::csv {

namespace {

void put(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void put(std::string& out, std::size_t v) { out += std::to_string(v); }
void put(std::string& out, int v) { out += std::to_string(v); }

template <typename T, typename... Rest>
void row(std::string& out, T first, Rest... rest) {
    put(out, first);
    ((out += ',', put(out, rest)), ...);
    out += '\n';
}

}  // namespace

std::string spectrum_csv(const JointSpectrum& js) {
    std::string out = "# schema: spdckit-spectrum v1\n";
    out += "wavelength_nm,detuning_rad_fs,intensity,phase_rad,delta_rad\n";
    out.reserve(out.size() + js.grid.count * 80);
    for (std::size_t i = 0; i < js.grid.count; ++i) {
        const double omega = js.omega0 + js.grid.detuning[i];
        row(out, omega_to_wavelength_nm({omega}), js.grid.detuning[i], js.intensity[i],
            js.phase[i], js.delta[i]);
    }
    return out;
}

std::string interferogram_csv(const Interferogram& ig) {
    std::string out = "# schema: spdckit-interferogram v1\n";
    out += "delay_fs,rate,envelope\n";
    out.reserve(out.size() + ig.delay_fs.size() * 50);
    for (std::size_t i = 0; i < ig.delay_fs.size(); ++i)
        row(out, ig.delay_fs[i], ig.rate[i], ig.envelope[i]);
    return out;
}

std::string domains_csv(const DomainSequence& seq) {
    std::string out = "# schema: spdckit-domains v1\n";
    out += "domain_index,z_start_um,length_um,sign\n";
    out.reserve(out.size() + seq.length_um.size() * 40);
    for (std::size_t i = 0; i < seq.length_um.size(); ++i)
        row(out, i, seq.start_um[i], seq.length_um[i], static_cast<int>(seq.sign[i]));
    return out;
}

std::string period_csv(const ProfileSpec& spec, std::size_t samples) {
    if (samples < 2) samples = 2;
    std::string out = "# schema: spdckit-period v1\n";
    out += "z_um,period_um\n";
    const double len = spec.total_length_um;
    for (std::size_t i = 0; i < samples; ++i) {
        const double z = len * static_cast<double>(i) / static_cast<double>(samples - 1);
        row(out, z, local_period(spec, z));
    }
    return out;
}

std::string trace_csv(const std::vector<GenerationStat>& trace) {
    std::string out = "# schema: spdckit-trace v1\n";
    out += "generation,best,mean\n";
    for (const auto& g : trace) row(out, g.generation, g.best_total, g.mean_total);
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace spdckit::csv
