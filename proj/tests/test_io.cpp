#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "cvqd/fock.hpp"
#include "cvqd/io.hpp"
#include "cvqd/trainer.hpp"
#include "cvqd/types.hpp"

using namespace cvqd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cvqd_io_test_" + std::to_string(std::uintptr_t(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("g17 formatting round trips doubles exactly") {
  double v = 1.0 / 3.0;
  CHECK(std::stod(io::format_g17(v)) == v);
  CHECK(std::stod(io::format_g17(8.55e-5)) == 8.55e-5);
  CHECK(io::format_g17(1.0) == "1");
}

TEST_CASE("atomic writes land complete and reads return them") {
  TempDir dir;
  std::string p = dir.file("blob.txt");
  io::atomic_write_file(p, "hello\nworld\n");
  CHECK(io::read_file(p) == "hello\nworld\n");
  CHECK_THROWS_AS(io::read_file(dir.file("missing.txt")), Error);
  CHECK_THROWS_AS(io::atomic_write_file(dir.file("no/such/dir/x.txt"), "x"), Error);
}

TEST_CASE("state files round trip bit-exactly") {
  TempDir dir;
  DensityMatrix rho = fock::make_coherent(cxd(0.37, -0.22), 7);
  std::string p = dir.file("state.json");
  io::save_state(p, rho);
  DensityMatrix back = io::load_state(p);
  CHECK(back.modes == 1);
  CHECK(back.cutoff == 7);
  CHECK((back.data - rho.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("malformed or mismatched state files are refused") {
  TempDir dir;
  std::string p = dir.file("bad.json");
  io::atomic_write_file(p, "{not json");
  CHECK_THROWS_AS(io::load_state(p), Error);
  io::atomic_write_file(p, R"({"version":2,"modes":1,"cutoff":2,"data":[[1,0],[0,0],[0,0],[0,0]]})");
  CHECK_THROWS_AS(io::load_state(p), Error);
  io::atomic_write_file(p, R"({"version":1,"modes":1,"cutoff":3,"data":[[1,0]]})");
  CHECK_THROWS_AS(io::load_state(p), Error);
  io::atomic_write_file(p, R"({"version":1,"modes":3,"cutoff":2,"data":[]})");
  CHECK_THROWS_AS(io::load_state(p), Error);
  try {
    io::load_state(p);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::IoError);
  }
}

TEST_CASE("config parser handles comments, quotes, and whitespace") {
  io::ConfigMap cfg = io::ConfigMap::from_text(
      "# leading comment\n"
      "cutoff = 12   # trailing comment\n"
      "target = \"coherent # not a comment\"\n"
      "learning_rate=0.00778\n"
      "\n"
      "seed = 42\n");
  CHECK(cfg.get_int("cutoff", 0) == 12);
  CHECK(cfg.get_string("target", "") == "coherent # not a comment");
  CHECK(cfg.get_double("learning_rate", 0) == 0.00778);
  CHECK(cfg.get_u64("seed", 0) == 42);
  CHECK(cfg.has("cutoff"));
  CHECK_FALSE(cfg.has("layers"));
  CHECK(cfg.get_int("layers", 9) == 9);
  CHECK_THROWS_AS(cfg.require_string("absent"), Error);
}

TEST_CASE("config parser rejects sections, duplicates, and bad scalars") {
  CHECK_THROWS_AS(io::ConfigMap::from_text("[section]\nx = 1\n"), Error);
  CHECK_THROWS_AS(io::ConfigMap::from_text("a = 1\na = 2\n"), Error);
  CHECK_THROWS_AS(io::ConfigMap::from_text("novalue =\n"), Error);
  CHECK_THROWS_AS(io::ConfigMap::from_text("just a line\n"), Error);
  io::ConfigMap cfg = io::ConfigMap::from_text("cutoff = twelve\n");
  CHECK_THROWS_AS(cfg.get_int("cutoff", 0), Error);
  CHECK_THROWS_AS(cfg.get_double("cutoff", 0), Error);
}

TEST_CASE("profiles carry the documented scales") {
  trainer::TrainConfig desk = io::desk_gen_profile();
  CHECK(desk.cutoff == 8);
  CHECK(desk.layers == 8);
  CHECK(desk.timesteps == 30);
  trainer::TrainConfig paper = io::paper_gen_profile();
  CHECK(paper.cutoff == 15);
  CHECK(paper.layers == 30);
  CHECK(paper.timesteps == 112);
  CHECK(paper.eta0 == 0.99974);
  CHECK(paper.etaT == 0.99331);
  trainer::TrainConfig restore = io::desk_restore_profile();
  CHECK(restore.cutoff == 8);
  CHECK(restore.timesteps == 40);
  CHECK(restore.nbar == 0.5);
  trainer::TrainConfig paper_r = io::paper_restore_profile();
  CHECK(paper_r.timesteps == 150);
  CHECK(paper_r.nbar == 0.5);
}

TEST_CASE("config keys override profile fields") {
  io::ConfigMap cfg = io::ConfigMap::from_text(
      "cutoff = 10\nlayers = 4\ntotal_timesteps = 20\nnbar = 0.25\n"
      "eta_0 = 0.98\neta_T = 0.9\nbatch_size = 5\nmax_iters = 7\n"
      "learning_rate = 0.002\ndecay_steps = 3\ndecay_rate = 0.9\n"
      "lambda = 0.5\ngamma = 50\ngrad_mode = \"spsa\"\nfd_step = 1e-5\n"
      "seed = 99\nalpha_embed = 1.5\ns_max = 0.7\ninit_scale = 0.02\nspsa_avg = 64\n");
  trainer::TrainConfig out = io::apply_config(cfg, io::desk_gen_profile());
  CHECK(out.cutoff == 10);
  CHECK(out.layers == 4);
  CHECK(out.timesteps == 20);
  CHECK(out.nbar == 0.25);
  CHECK(out.eta0 == 0.98);
  CHECK(out.etaT == 0.9);
  CHECK(out.batch_size == 5);
  CHECK(out.max_iters == 7);
  CHECK(out.lr0 == 0.002);
  CHECK(out.decay_steps == 3);
  CHECK(out.decay_rate == 0.9);
  CHECK(out.lambda == 0.5);
  CHECK(out.gamma == 50);
  CHECK(out.grad_mode == trainer::GradMode::Spsa);
  CHECK(out.fd_step == 1e-5);
  CHECK(out.seed == 99);
  CHECK(out.alpha_embed == 1.5);
  CHECK(out.s_max == 0.7);
  CHECK(out.init_scale == 0.02);
  CHECK(out.spsa_avg == 64);
}

TEST_CASE("unknown config keys are rejected") {
  io::ConfigMap cfg = io::ConfigMap::from_text("cutofff = 8\n");
  CHECK_THROWS_AS(io::apply_config(cfg, io::desk_gen_profile()), Error);
}

TEST_CASE("damping endpoints map to transmissivities unless eta is explicit") {
  io::ConfigMap beta = io::ConfigMap::from_text("beta_start = 1e-4\nbeta_end = 0.05\n");
  trainer::TrainConfig out = io::apply_config(beta, io::desk_gen_profile());
  CHECK(out.eta0 == doctest::Approx(0.9999).epsilon(1e-15));
  CHECK(out.etaT == doctest::Approx(0.95).epsilon(1e-15));
  io::ConfigMap both = io::ConfigMap::from_text(
      "beta_start = 1e-4\nbeta_end = 0.05\neta_0 = 0.9\neta_T = 0.8\n");
  trainer::TrainConfig out2 = io::apply_config(both, io::desk_gen_profile());
  CHECK(out2.eta0 == 0.9);
  CHECK(out2.etaT == 0.8);
  io::ConfigMap half = io::ConfigMap::from_text("beta_start = 1e-4\n");
  CHECK_THROWS_AS(io::apply_config(half, io::desk_gen_profile()), Error);
}

TEST_CASE("target descriptors cover the four state families") {
  io::ConfigMap c1 = io::ConfigMap::from_text(
      "target = \"coherent\"\nalpha_re = 0.6\nalpha_im = 0.3\n");
  io::TargetDescriptor t1 = io::target_from_config(c1);
  CHECK(t1.kind == "coherent");
  DensityMatrix r1 = io::build_target(t1, 10);
  CHECK(fock::trace_distance(r1, fock::make_coherent(cxd(0.6, 0.3), 10)) < 1e-14);

  io::ConfigMap c2 = io::ConfigMap::from_text("target = \"fock\"\nfock_n = 1\n");
  DensityMatrix r2 = io::build_target(io::target_from_config(c2), 8);
  CHECK(fock::trace_distance(r2, fock::make_fock(1, 8)) < 1e-14);

  io::ConfigMap c3 = io::ConfigMap::from_text(
      "target = \"cat\"\nalpha_re = 1.0\nparity = \"odd\"\n");
  DensityMatrix r3 = io::build_target(io::target_from_config(c3), 12);
  CHECK(fock::trace_distance(r3, fock::make_cat(cxd(1.0, 0.0), false, 12)) < 1e-14);

  io::ConfigMap c4 = io::ConfigMap::from_text("target = \"squeezed\"\nsqueeze_r = 0.5\n");
  DensityMatrix r4 = io::build_target(io::target_from_config(c4), 12);
  CHECK(fock::trace_distance(r4, fock::make_squeezed_vacuum(0.5, 12)) < 1e-14);

  io::ConfigMap bad = io::ConfigMap::from_text("target = \"ghz\"\n");
  CHECK_THROWS_AS(io::target_from_config(bad), Error);
  io::ConfigMap parity = io::ConfigMap::from_text("target = \"cat\"\nparity = \"none\"\n");
  CHECK_THROWS_AS(io::target_from_config(parity), Error);
  io::ConfigMap empty = io::ConfigMap::from_text("");
  CHECK_THROWS_AS(io::target_from_config(empty), Error);
}

TEST_CASE("checkpoints round trip bit-exactly") {
  TempDir dir;
  io::Checkpoint ck;
  ck.role = "generative";
  ck.cfg = io::desk_gen_profile();
  ck.cfg.seed = 1234;
  ck.cfg.lambda = 1.0 / 3.0;
  ck.theta = Eigen::VectorXd::LinSpaced(16 * ck.cfg.layers, -0.3, 0.7);
  ck.target.kind = "coherent";
  ck.target.alpha_re = 1.0 / 7.0;
  ck.summary = {0.0123, 0.011, 321, true};
  std::string p = dir.file("ck.json");
  io::save_checkpoint(p, ck);
  io::Checkpoint back = io::load_checkpoint(p);
  CHECK(back.format_version == "cvqd-ckpt-1");
  CHECK(back.layout == "cvqnn-16p-v1");
  CHECK(back.role == "generative");
  CHECK(back.cfg.seed == 1234);
  CHECK(back.cfg.lambda == ck.cfg.lambda);
  CHECK(back.cfg.grad_mode == ck.cfg.grad_mode);
  CHECK((back.theta - ck.theta).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.target.kind == "coherent");
  CHECK(back.target.alpha_re == ck.target.alpha_re);
  CHECK(back.summary.iterations == 321);
  CHECK(back.summary.converged == true);
  CHECK(back.summary.final_loss == 0.0123);
}

TEST_CASE("checkpoints from other versions or layouts are refused") {
  TempDir dir;
  io::Checkpoint ck;
  ck.role = "restoration";
  ck.cfg = io::desk_restore_profile();
  ck.theta = Eigen::VectorXd::Zero(16 * ck.cfg.layers);
  std::string p = dir.file("ck.json");
  io::save_checkpoint(p, ck);
  std::string text = io::read_file(p);
  std::string forward = text;
  size_t at = forward.find("cvqd-ckpt-1");
  forward.replace(at, 11, "cvqd-ckpt-2");
  io::atomic_write_file(p, forward);
  CHECK_THROWS_AS(io::load_checkpoint(p), Error);
  io::atomic_write_file(p, text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(io::load_checkpoint(p), Error);
  try {
    io::load_checkpoint(p);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::IoError);
  }
  io::Checkpoint badrole = ck;
  badrole.role = "oracle";
  CHECK_THROWS_AS(io::save_checkpoint(dir.file("x.json"), badrole), Error);
  io::Checkpoint badlen = ck;
  badlen.theta = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(io::save_checkpoint(dir.file("y.json"), badlen), Error);
}

TEST_CASE("csv emitters use stable headers and g17 values") {
  std::vector<trainer::MetricsRow> rows(1);
  rows[0] = {3, 0.01, 0.5, 0.25, 0.75, 1e-6, 12.5};
  std::string m = io::metrics_csv(rows);
  CHECK(m.substr(0, m.find('\n')) ==
        "iter,lr,loss_total,loss_t0,mean_step_fidelity,mean_trace_penalty,wall_ms");
  CHECK(m.find("\n3,0.01") != std::string::npos);

  std::string curve = io::curve_csv({{0, 1.0}, {1, 0.5}}, "fidelity_vs_target");
  CHECK(curve == "t,fidelity_vs_target\n0,1\n1,0.5\n");

  diffusion::NoiseSchedule sched = diffusion::linear_schedule(0.99, 0.9, 2);
  std::string s = io::schedule_csv(sched);
  CHECK(s.substr(0, 19) == "t,eta_t,eta_bar_t\n0");
  CHECK(s.find("\n0,1,1\n") != std::string::npos);

  std::string sw = io::sweep_csv({{0.5, 0.0, 0.9987, 210}});
  CHECK(sw.substr(0, sw.find('\n')) == "param,nbar,fidelity,iters");
}

TEST_CASE("timestamps and manifests") {
  std::string ts = io::utc_timestamp();
  CHECK(ts.size() == 20);
  CHECK(ts[10] == 'T');
  CHECK(ts.back() == 'Z');
  TempDir dir;
  io::RunManifest mf;
  mf.command = "diffuse";
  mf.config_path = "cfg.toml";
  mf.seed = 7;
  mf.started_at = ts;
  mf.finished_at = io::utc_timestamp();
  mf.outputs = {"a.json", "b.csv"};
  std::string p = dir.file("manifest.json");
  io::save_manifest(p, mf);
  std::string text = io::read_file(p);
  CHECK(text.find("\"command\": \"diffuse\"") != std::string::npos);
  CHECK(text.find("a.json") != std::string::npos);
  CHECK(text.find("b.csv") != std::string::npos);
}

}
