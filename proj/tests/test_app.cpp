#include <filesystem>
#include <fstream>
#include <sstream>

#include "app/config.hpp"
#include "app/run.hpp"
#include "doctest.h"
#include "fem/generators.hpp"
#include "fem/mesh.hpp"

using namespace rivet;
using namespace rivet::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("rivet_app_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

ErrorKind kind_of(const KeyValues& kv) {
  try {
    run(parse_config(kv));
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

std::string message_of(const KeyValues& kv) {
  try {
    parse_config(kv);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

// Small fem setup on a 4x4 unit square written to disk.
KeyValues square_fem(const fs::path& dir, double u_max) {
  fem::write_mesh_file((dir / "square.mesh").string(),
                       fem::structured_rectangle(0, 0, 1, 1, 4, 4));
  return {{"run.experiment", "fem"},
          {"run.output_dir", (dir / "out").string()},
          {"mesh.file", (dir / "square.mesh").string()},
          {"material.E", "100"},
          {"material.nu", "0.3"},
          {"material.gc", "1"},
          {"material.l", "0.2"},
          {"em.rho", "0.05"},
          {"em.t_end", "0.2"},
          {"loading.set", "top"},
          {"loading.component", "y"},
          {"loading.u_max", std::to_string(u_max)},
          {"loading.fixed", "bottom"}};
}

}  // namespace

TEST_SUITE("app") {
  TEST_CASE("ini reader flattens sections and rejects duplicates") {
    const fs::path d = scratch("ini");
    std::ofstream(d / "a.ini") << "; comment\n[run]\nexperiment = toy-em\n[em]\nrho = 0.002\n";
    const KeyValues kv = read_ini((d / "a.ini").string());
    CHECK(kv.at("run.experiment") == "toy-em");
    CHECK(kv.at("em.rho") == "0.002");

    std::ofstream(d / "b.ini") << "[em]\nrho = 1\nrho = 2\n";
    CHECK_THROWS_AS(read_ini((d / "b.ini").string()), Error);
    try {
      read_ini((d / "missing.ini").string());
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Io);
    }
  }

  TEST_CASE("minimal toy config parses with toy defaults") {
    const RunConfig c = parse_config({{"run.experiment", "toy-em"}});
    CHECK(c.experiment == Experiment::ToyEm);
    CHECK(c.em.rho == doctest::Approx(0.001));
    CHECK(c.em.t_end == doctest::Approx(1.4));
    CHECK(c.toy.z0 == doctest::Approx(33.5));
    CHECK(c.toy.n_am == 20);
  }

  TEST_CASE("fem without material names the section") {
    const fs::path d = scratch("nomat");
    KeyValues kv = square_fem(d, 0.01);
    for (auto it = kv.begin(); it != kv.end();) {
      it = it->first.rfind("material.", 0) == 0 ? kv.erase(it) : std::next(it);
    }
    CHECK(message_of(kv).find("[material]") != std::string::npos);
  }

  TEST_CASE("all violations are reported together") {
    const std::string msg = message_of({{"run.experiment", "toy-am"},
                                        {"toy.dt", "-1"},
                                        {"toy.n_am", "x"},
                                        {"toy.colour", "red"},
                                        {"em.rho", "abc"}});
    CHECK(msg.find("toy.dt") != std::string::npos);
    CHECK(msg.find("toy.n_am") != std::string::npos);
    CHECK(msg.find("toy.colour") != std::string::npos);
    CHECK(msg.find("em.rho") != std::string::npos);
    CHECK(msg.find("4 configuration error") != std::string::npos);
  }

  TEST_CASE("ct preset with an overridden rho") {
    const RunConfig c = parse_config({{"run.preset", "ct"}, {"em.rho", "0.005"}});
    CHECK(c.experiment == Experiment::Fem);
    CHECK(c.fem.material.E == 100.0);
    CHECK(c.fem.material.nu == 0.3);
    CHECK(c.fem.material.gc == 1.0);
    CHECK(c.fem.material.l == 0.05);
    CHECK(c.em.rho == 0.005);
    CHECK(c.em.t_end == doctest::Approx(0.5));
    REQUIRE(!c.fem.loading.dirichlet.empty());
    const auto& bc = c.fem.loading.dirichlet.front();
    CHECK(bc.set == "top");
    CHECK(bc.component == 1);
    CHECK(bc.amplitude.at(c.em.t_end) == doctest::Approx(0.3));
    CHECK(c.fem.reaction_set == "top");
  }

  TEST_CASE("newton iteration caps") {
    const RunConfig c = parse_config({{"run.preset", "ct"}});
    CHECK(c.fem.newton_max_iters_u == 25);
    CHECK(c.fem.newton_max_iters_z == 200);
    const RunConfig d = parse_config({{"run.preset", "ct"}, {"newton.max_iters_z", "40"}});
    CHECK(d.fem.newton_max_iters_z == 40);
    CHECK_THROWS_AS(parse_config({{"run.preset", "ct"}, {"newton.max_iters_u", "0"}}), Error);
  }

  TEST_CASE("lshape preset values") {
    const RunConfig c = parse_config({{"run.preset", "lshape"}});
    CHECK(c.fem.material.E == 25840.0);
    CHECK(c.fem.material.nu == 0.18);
    CHECK(c.fem.material.gc == 0.65);
    CHECK(c.fem.material.l == 10.0);
    CHECK(c.em.rho == 0.08658);
    CHECK(c.em.t_end == doctest::Approx(8.658));
    CHECK(c.fem.loading.dirichlet.front().amplitude.at(8.658) == doctest::Approx(0.8));
    const fem::Mesh m = build_mesh(c.fem);
    CHECK(m.node_set("load").size() == 1);
  }

  TEST_CASE("unknown preset is a config error") {
    CHECK(message_of({{"run.preset", "dogbone"}}).find("dogbone") != std::string::npos);
  }

  TEST_CASE("toy-em run writes its files and reruns byte-identically") {
    const fs::path d = scratch("toyem");
    KeyValues kv = {{"run.experiment", "toy-em"}, {"run.output_dir", (d / "a").string()},
                    {"toy.stable_nt", "15"},      {"toy.stable_nz", "46"}};
    const RunSummary s = run(parse_config(kv));
    CHECK(s.steps > 1400);
    for (const char* f : {"toy-trajectory.csv", "stable-set.csv", "reduced-energy.csv"}) {
      CHECK(fs::exists(d / "a" / f));
    }
    CHECK(lines(d / "a" / "toy-trajectory.csv").front() == "step,t,z,u1,u2,F_red");
    CHECK(lines(d / "a" / "stable-set.csv").size() == 1 + 15 * 46);
    kv["run.output_dir"] = (d / "b").string();
    run(parse_config(kv));
    for (const char* f : {"toy-trajectory.csv", "stable-set.csv", "reduced-energy.csv"}) {
      CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    }
  }

  TEST_CASE("snap run writes the trajectory") {
    const fs::path d = scratch("snap");
    run(parse_config({{"run.experiment", "snap"}, {"run.output_dir", d.string()}}));
    const auto l = lines(d / "snap-trajectory.csv");
    CHECK(l.front() == "step,t,u,F,newton_iters");
    CHECK(l.size() > 100);
  }

  TEST_CASE("elastic fem run gives a straight force-displacement line") {
    const fs::path d = scratch("elastic");
    const RunSummary s = run(parse_config(square_fem(d, 1e-6)));
    CHECK(s.steps == 5);
    const auto l = lines(d / "out" / "force-displacement.csv");
    REQUIRE(l.size() == 6);
    CHECK(l[0] == "u_bar,F");
    CHECK(l[1] == "0,0");
    double slope = 0.0;
    for (size_t i = 2; i < l.size(); ++i) {
      const double u = std::stod(l[i].substr(0, l[i].find(',')));
      const double f = std::stod(l[i].substr(l[i].find(',') + 1));
      REQUIRE(u > 0.0);
      if (i == 2) slope = f / u;
      CHECK(f / u == doctest::Approx(slope).epsilon(1e-6));
    }
    // Uniaxial plane-strain column, lateral edges free: slope is about E'.
    CHECK(slope > 100.0);
    CHECK(slope < 100.0 / (1.0 - 0.09) * 1.2);
    CHECK(fs::exists(d / "out" / "final.vtk"));
    CHECK(fs::exists(d / "out" / "trajectory.csv"));
  }

  TEST_CASE("coarse ct run emits trajectory and snapshots") {
    const fs::path d = scratch("ct");
    KeyValues kv = {{"run.preset", "ct"},
                    {"run.output_dir", d.string()},
                    {"em.max_steps", "3"},
                    {"em.snapshot_every", "1"}};
    const RunSummary s = run(parse_config(kv));
    CHECK(s.steps == 3);
    for (const char* f : {"snapshot_00001.vtk", "snapshot_00002.vtk", "snapshot_00003.vtk",
                          "final.vtk", "trajectory.csv", "force-displacement.csv"}) {
      CHECK(fs::exists(d / f));
    }
    CHECK(lines(d / "trajectory.csv").size() == 4);
    const std::string vtk = slurp(d / "snapshot_00001.vtk");
    CHECK(vtk.find("SCALARS z double") != std::string::npos);
    CHECK(vtk.find("VECTORS u double") != std::string::npos);
  }

  TEST_CASE("failed first step leaves a header-only force-displacement file") {
    const fs::path d = scratch("fail");
    KeyValues kv = square_fem(d, 0.05);
    kv["loading.traction_set"] = "top";
    kv["loading.traction_x"] = "5";
    kv["em.max_am_iters"] = "1";
    kv["em.stag_tol"] = "1e-300";
    CHECK(exit_code(kind_of(kv)) == 3);
    CHECK(lines(d / "out" / "force-displacement.csv") == std::vector<std::string>{"u_bar,F"});
  }

  TEST_CASE("invalid mesh maps to the input exit code") {
    const fs::path d = scratch("badmesh");
    KeyValues kv = square_fem(d, 0.01);
    std::ofstream(d / "square.mesh") << "N 1 0 0\nN 2 1 0\nE 1 tri3 1 2 7\n";
    CHECK(exit_code(kind_of(kv)) == 2);
    kv["mesh.file"] = (d / "nowhere.mesh").string();
    CHECK(message_of(kv).find("nowhere.mesh") != std::string::npos);
  }

  TEST_CASE("shipped configs validate") {
    for (const char* name : {"toy-em.ini", "snap.ini", "ct.ini", "lshape.ini"}) {
      CAPTURE(name);
      CHECK_NOTHROW(parse_config_file(std::string(RIVET_CONFIG_DIR) + "/" + name));
    }
  }

  TEST_CASE("unwritable output directory maps to the I/O exit code") {
    const fs::path d = scratch("io");
    std::ofstream(d / "file") << "x";
    KeyValues kv = {{"run.experiment", "snap"}, {"run.output_dir", (d / "file" / "sub").string()}};
    CHECK(exit_code(kind_of(kv)) == 4);
  }
}
