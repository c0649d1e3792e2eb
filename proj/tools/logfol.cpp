#include "logfol/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

namespace {

using namespace logfol;
using logfol::cli::Options;

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write JSON report to '" + path + "'");
  out << j.dump(2) << "\n";
}

/// Worst decision of a batch: input errors, then inconclusive, then negative.
Outcome batch_outcome(const std::vector<Report>& reports) {
  auto has = [&](Outcome o) { return std::any_of(reports.begin(), reports.end(), [&](const Report& r) { return r.decision == o; }); };
  if (has(Outcome::InputError)) return Outcome::InputError;
  if (has(Outcome::Inconclusive)) return Outcome::Inconclusive;
  if (has(Outcome::Negative)) return Outcome::Negative;
  return Outcome::Positive;
}

int run_all(const std::string& dir, const Options& opts, const std::string& json_path) {
  std::vector<std::string> paths;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".scene") paths.push_back(entry.path().string());
  if (ec) {
    std::cerr << "error: cannot read directory '" << dir << "': " << ec.message() << "\n";
    return exit_code(Outcome::InputError);
  }
  std::sort(paths.begin(), paths.end());
  std::vector<std::future<Report>> jobs;
  for (const auto& p : paths) jobs.push_back(std::async(std::launch::async, [p, opts] { return cli::run_scene_file(p, "", opts); }));
  std::vector<Report> reports;
  nlohmann::json arr = nlohmann::json::array();
  for (auto& j : jobs) {
    reports.push_back(j.get());
    reports.back().print(std::cout);
    arr.push_back(reports.back().to_json());
  }
  const Outcome overall = batch_outcome(reports);
  std::cout << "batch: " << reports.size() << " scenes, overall " << to_string(overall) << "\n";
  if (!json_path.empty()) write_json(json_path, arr);
  return exit_code(overall);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact checks for foliations on normal crossing germs"};
  app.require_subcommand(0, 1);
  int order = 0;
  std::string json_path, all_dir;
  app.add_option("--order", order, "truncation order for jet computations (default 6)")->check(CLI::PositiveNumber);
  app.add_option("--json", json_path, "also write the report as JSON to this path");
  app.add_option("--all", all_dir, "run every *.scene file in a directory, using each scene's 'command' entry");

  std::string command;
  std::string scene_path;
  auto scene_sub = [&](CLI::App* parent, const std::string& name, const std::string& full, const std::string& help) {
    auto* sub = parent->add_subcommand(name, help);
    sub->add_option("scene", scene_path, "scene file")->required();
    sub->callback([&command, full] { command = full; });
    return sub;
  };

  auto* monoid = app.add_subcommand("monoid", "saturation of finitely generated monoids")->require_subcommand(1);
  scene_sub(monoid, "saturate", "monoid saturate", "saturation with witnesses");
  scene_sub(monoid, "check", "monoid check", "is the monoid saturated");
  auto* semistable = app.add_subcommand("semistable", "d-semistability of a foliated germ")->require_subcommand(1);
  scene_sub(semistable, "check", "semistable check", "search for a flat unit");
  auto* cs = app.add_subcommand("cs", "Camacho-Sad indices")->require_subcommand(1);
  scene_sub(cs, "paper", "cs paper", "indices from a log 1-form on a normal crossing germ");
  scene_sub(cs, "surface", "cs surface", "residue index of {y=0} for surface 1-forms");
  auto* pushout = app.add_subcommand("pushout", "gluing of component foliations")->require_subcommand(1);
  scene_sub(pushout, "check", "pushout check", "cocycle condition and pushout membership");
  auto* cohomology = app.add_subcommand("cohomology", "exact Cech cohomology")->require_subcommand(1);
  long degree = 0;
  auto* p1 = cohomology->add_subcommand("p1", "cohomology of O(d) on P^1");
  p1->add_option("--deg", degree, "degree d")->required();
  p1->callback([&] { command = "cohomology p1"; });
  scene_sub(cohomology, "snc-curve", "cohomology snc-curve", "bundle on two lines glued at a point");
  scene_sub(&app, "leaf-complex", "leaf-complex", "hypercohomology of the leaf complex");
  auto* obstruction = app.add_subcommand("obstruction", "deformation obstructions")->require_subcommand(1);
  scene_sub(obstruction, "verify", "obstruction verify", "check the obstruction cocycle equations");
  scene_sub(obstruction, "lie", "obstruction lie", "obstruction to deforming a Lie subalgebra");
  scene_sub(&app, "holonomy", "holonomy", "linear holonomy gluing criterion");
  std::uint64_t seed = 1;
  auto* selftest = app.add_subcommand("selftest", "randomized identity checks");
  selftest->add_option("--seed", seed, "random seed");
  selftest->callback([&] { command = "selftest"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(Outcome::InputError);
  }

  Options opts;
  if (order > 0) opts.order = order;
  try {
    if (!all_dir.empty()) return run_all(all_dir, opts, json_path);
    if (command.empty()) {
      std::cerr << app.help();
      return exit_code(Outcome::InputError);
    }
    Report rep;
    if (command == "cohomology p1")
      rep = cli::guarded(command, "", [&] { return cli::cohomology_p1(degree); });
    else if (command == "selftest")
      rep = cli::guarded(command, "", [&] { return cli::selftest(seed); });
    else
      rep = cli::run_scene_file(scene_path, command, opts);
    rep.print(std::cout);
    if (!json_path.empty()) write_json(json_path, rep.to_json());
    return rep.exit_code();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(Outcome::InputError);
  }
}
