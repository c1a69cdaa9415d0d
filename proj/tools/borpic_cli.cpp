#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "borpic/config.hpp"
#include "borpic/constants.hpp"
#include "borpic/error.hpp"
#include "borpic/output.hpp"
#include "borpic/run_config.hpp"
#include "borpic/simulation.hpp"
#include "borpic/spectrum.hpp"

namespace {

using namespace borpic;

int run_document(ConfigDocument doc, const std::vector<std::string>& overrides,
                 const std::string& out_dir) {
  for (const auto& o : overrides) apply_override(doc, o);
  RunConfig config = run_config_from(doc);
  if (!out_dir.empty()) config.output.directory = out_dir;
  Simulation sim(config);
  std::printf("%s: %lld faces, dt = %.6g s, %ld steps\n", config.name.c_str(),
              static_cast<long long>(sim.mesh().num_faces()), sim.dt(), config.steps);
  sim.run();
  std::printf("wrote %s/\n", config.output.directory.c_str());
  return 0;
}

int mesh_info(const std::string& path, const std::string& format, bool periodic) {
  MeshFormat f = format == "msh2" ? MeshFormat::msh2 : MeshFormat::native;
  Mesh mesh = load_mesh(path, f, MeshOptions{.periodic_z = periodic});
  Index axis = 0, outer = 0;
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge_tags(e) & tag_axis) ++axis;
    if (mesh.edge_tags(e) & tag_outer) ++outer;
  }
  std::printf("nodes %lld\nedges %lld\nfaces %lld\n", static_cast<long long>(mesh.num_nodes()),
              static_cast<long long>(mesh.num_edges()), static_cast<long long>(mesh.num_faces()));
  std::printf("z range [%.9g, %.9g]\nrho max %.9g\n", mesh.z_min(), mesh.z_max(), mesh.rho_max());
  std::printf("edge length [%.6g, %.6g]\n", mesh.min_edge_length(), mesh.max_edge_length());
  std::printf("axis edges %lld\nouter edges %lld\n", static_cast<long long>(axis),
              static_cast<long long>(outer));
  if (periodic) std::printf("periodic pairs %zu\n", mesh.periodic_pair_count());
  return 0;
}

int spectrum(const std::string& path, std::string column, const std::string& out) {
  CsvTable table = read_csv(path);
  if (table.header.size() < 2 || table.header[0] != "t")
    throw Error(path + ": expected a probe file with a t column");
  if (column.empty()) column = table.header[1];
  auto t = table.column("t");
  auto values = table.column(column);
  if (t.size() < 2) throw Error(path + ": too few samples");
  const double interval = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  Spectrum s = fft_spectrum(values, interval);
  SpectralPeak peak = find_peak(s, 2);
  std::printf("%s: %zu samples, bin spacing %.6g Hz\n", column.c_str(), values.size(),
              s.bin_spacing);
  std::printf("peak %.6g Hz (%.6g rad/s), amplitude %.6g\n", peak.frequency,
              two_pi * peak.frequency, peak.amplitude);
  if (!out.empty()) {
    CsvTable result;
    result.header = {"frequency", "amplitude"};
    for (std::size_t k = 0; k < s.frequency.size(); ++k)
      result.rows.push_back({s.frequency[k], s.amplitude[k]});
    write_csv(out, result);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axisymmetric electromagnetic particle-in-cell simulator"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir, mesh_path, mesh_format = "native", probe_path,
                                                          column, spectrum_out;
  std::vector<std::string> overrides;
  bool periodic = false, list = false, print = false;

  auto* run = app.add_subcommand("run", "run a configuration file");
  run->add_option("config", config_path, "configuration file")->required();
  run->add_option("--override,-o", overrides, "section.key=value");
  run->add_option("--out", out_dir, "output directory");

  auto* preset = app.add_subcommand("preset", "run a built-in experiment");
  preset->add_option("name", preset_name, "preset name");
  preset->add_option("--override,-o", overrides, "section.key=value");
  preset->add_option("--out", out_dir, "output directory");
  preset->add_flag("--list", list, "list preset names");
  preset->add_flag("--print", print, "print the resolved configuration values and exit");
  std::string write_mesh;
  preset->add_option("--write-mesh", write_mesh, "write the preset mesh in native format and exit");

  auto* info = app.add_subcommand("mesh-info", "summarize a mesh file");
  info->add_option("file", mesh_path)->required();
  info->add_option("--format", mesh_format)->check(CLI::IsMember({"native", "msh2"}));
  info->add_flag("--periodic", periodic, "pair the z boundaries");

  auto* spec = app.add_subcommand("spectrum", "amplitude spectrum of a probe series");
  spec->add_option("probe", probe_path, "probe CSV")->required();
  spec->add_option("--column", column, "component (default: first)");
  spec->add_option("--out", spectrum_out, "write frequency,amplitude CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_document(load_config(config_path), overrides, out_dir);
    if (*preset) {
      if (list || preset_name.empty()) {
        for (const auto& n : preset_names()) std::printf("%s\n", n.c_str());
        return preset_name.empty() && !list ? 2 : 0;
      }
      if (!write_mesh.empty()) {
        ConfigDocument doc = preset_document(preset_name);
        for (const auto& o : overrides) apply_override(doc, o);
        write_native_mesh(build_mesh(run_config_from(doc)), write_mesh);
        return 0;
      }
      if (print) {
        ConfigDocument doc = preset_document(preset_name);
        for (const auto& o : overrides) apply_override(doc, o);
        RunConfig c = run_config_from(doc);
        char dt[32] = "auto";
        if (c.dt) std::snprintf(dt, sizeof dt, "%.9g", *c.dt);
        std::printf("name %s\nsteps %ld\ndt %s\npml %s\nparticles %zu\nsources %zu\nprobes %zu\n",
                    c.name.c_str(), c.steps, dt,
                    c.pml.enabled ? "on" : "pmc-closed", c.particles.size(), c.sources.size(),
                    c.probes.size());
        return 0;
      }
      return run_document(preset_document(preset_name), overrides,
                          out_dir.empty() ? "out/" + preset_name : out_dir);
    }
    if (*info) return mesh_info(mesh_path, mesh_format, periodic);
    if (*spec) return spectrum(probe_path, column, spectrum_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
