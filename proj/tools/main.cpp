// rmtsharp command-line front end: sample sparse random 0/1 matrices, audit
// their combinatorial structure, measure spectra and distances, drive batch
// experiments from JSON configs, and aggregate record files.
//
// Exit codes: 0 success, 1 runtime failure (I/O, non-convergence),
// 2 usage error (bad flags, bad parameters, malformed overrides).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rmtsharp/rmtsharp.hpp"

namespace fs = std::filesystem;

namespace {

std::string joined(const std::string& out_dir, const std::string& name) {
  fs::path p(name);
  if (p.is_absolute() || out_dir.empty() || out_dir == ".") return name;
  return (fs::path(out_dir) / p).string();
}

void emit_or_print(const nlohmann::json& j, const std::string& path,
                   const std::string& out_dir) {
  if (path.empty())
    std::cout << j.dump(2) << '\n';
  else
    rmtsharp::emit_json(j, joined(out_dir, path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral laboratory for sparse random 0/1 matrices"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  int verbosity = 1;
  app.add_option("--out-dir", out_dir, "directory emitted files land in")
      ->capture_default_str();
  app.add_option("--verbosity", verbosity, "0 silences progress logging")
      ->capture_default_str();

  // --- sample ---------------------------------------------------------------
  auto* sample_cmd =
      app.add_subcommand("sample", "draw one adjacency matrix and write it as text");
  sample_cmd->fallthrough();
  std::string sm_model = "undirected";
  int sm_n = 0;
  double sm_p = 0.0;
  std::uint64_t sm_seed = 1, sm_stream = 0;
  std::string sm_out = "matrix.txt";
  sample_cmd->add_option("--model", sm_model, "undirected|directed|bipartite")
      ->capture_default_str();
  sample_cmd->add_option("--n", sm_n, "matrix size")->required();
  sample_cmd->add_option("--p", sm_p, "edge probability")->required();
  sample_cmd->add_option("--seed", sm_seed, "base seed")->capture_default_str();
  sample_cmd->add_option("--stream", sm_stream, "stream index under the seed")
      ->capture_default_str();
  sample_cmd->add_option("--out", sm_out, "output path")->capture_default_str();
  sample_cmd->callback([&] {
    rmtsharp::GraphModel model{rmtsharp::model_kind_from_string(sm_model), sm_n, sm_p};
    model.validate();
    const rmtsharp::SparseBinaryMatrix a =
        rmtsharp::sample(model, rmtsharp::SeededRng{sm_seed, sm_stream});
    const std::string path = joined(out_dir, sm_out);
    rmtsharp::emit_matrix(a, path);
    if (verbosity > 0)
      std::cerr << "wrote " << path << " (" << a.rows() << "x" << a.cols() << ", "
                << a.nnz() << " nonzeros)\n";
  });

  // --- audit ----------------------------------------------------------------
  auto* audit_cmd = app.add_subcommand(
      "audit", "check the light-column / folded-support structure of a matrix");
  audit_cmd->fallthrough();
  std::string au_in, au_json;
  double au_p = 0.0;
  std::uint64_t au_stream = 0;
  rmtsharp::StructureParams au_params;
  audit_cmd->add_option("--in", au_in, "matrix file")->required();
  audit_cmd->add_option("--p", au_p, "density the structural thresholds scale with")
      ->required();
  audit_cmd->add_option("--delta0", au_params.delta0)->capture_default_str();
  audit_cmd->add_option("--c-heavy", au_params.c_heavy)->capture_default_str();
  audit_cmd->add_option("--r0", au_params.r0)->capture_default_str();
  audit_cmd->add_option("--c-ext", au_params.c_ext)->capture_default_str();
  audit_cmd->add_option("--n-sub", au_params.n_sub)->capture_default_str();
  audit_cmd->add_option("--exhaustive-n-max", au_params.exhaustive_n_max)
      ->capture_default_str();
  audit_cmd->add_option("--subset-seed", au_params.subset_seed)->capture_default_str();
  audit_cmd->add_option("--subset-stream", au_stream, "stream for subset sampling")
      ->capture_default_str();
  audit_cmd->add_option("--json", au_json, "write the report here instead of stdout");
  audit_cmd->callback([&] {
    const rmtsharp::SparseBinaryMatrix a = rmtsharp::load_matrix(au_in);
    const rmtsharp::StructuralReport rep =
        rmtsharp::check_typical_structure(a, au_p, au_params, au_stream);
    emit_or_print(rmtsharp::structural_report_to_json(rep), au_json, out_dir);
  });

  // --- spectrum ---------------------------------------------------------------
  auto* spec_cmd = app.add_subcommand(
      "spectrum", "certificate, extremal singular values and condition numbers");
  spec_cmd->fallthrough();
  std::string sp_in, sp_json, sp_model;
  double sp_p = -1.0, sp_tol = 1e-10;
  int sp_ndense = 1024, sp_maxiter = 10000;
  bool sp_eigen = false;
  spec_cmd->add_option("--in", sp_in, "matrix file")->required();
  spec_cmd->add_option("--tol", sp_tol)->capture_default_str();
  spec_cmd->add_option("--n-dense", sp_ndense, "sizes up to this use the dense path")
      ->capture_default_str();
  spec_cmd->add_option("--max-iter", sp_maxiter)->capture_default_str();
  spec_cmd->add_option("--model", sp_model,
                       "with --p: also report the mean-centered operator norm");
  spec_cmd->add_option("--p", sp_p, "density for the centered norm");
  spec_cmd->add_flag("--eigen", sp_eigen, "also report the top eigenpair");
  spec_cmd->add_option("--json", sp_json, "write the summary here instead of stdout");
  spec_cmd->callback([&] {
    const rmtsharp::SparseBinaryMatrix a = rmtsharp::load_matrix(sp_in);
    rmtsharp::SpectralSummary s;
    s.singular_exact = rmtsharp::certify_singularity(a);
    rmtsharp::SingularTriple t =
        rmtsharp::singular_extremes(a, sp_tol, sp_ndense, sp_maxiter);
    if (s.singular_exact == rmtsharp::Certificate::Singular) t.s_min = 0.0;
    s.s_min = t.s_min;
    s.s2 = t.s2;
    s.s_max = t.s_max;
    const auto [sigma, sigma_tilde] = rmtsharp::condition_numbers(s);
    s.sigma = sigma;
    s.sigma_tilde = sigma_tilde;
    if (!sp_model.empty()) {
      if (!(sp_p > 0.0 && sp_p < 1.0))
        throw rmtsharp::parameter_error("--model needs --p in (0,1)");
      rmtsharp::GraphModel model{rmtsharp::model_kind_from_string(sp_model), a.rows(),
                                 sp_p};
      model.validate();
      s.centered_norm = rmtsharp::centered_operator_norm(a, model, sp_tol, sp_maxiter);
    }
    if (sp_eigen) {
      const rmtsharp::TopEigenpair top =
          rmtsharp::top_eigenpair(a, sp_tol, sp_maxiter);
      if (top.converged) {
        s.lambda0 = top.lambda0;
        s.eigvec_dev = top.eigvec_dev;
      }
    }
    emit_or_print(rmtsharp::spectral_summary_to_json(s), sp_json, out_dir);
  });

  // --- distance ---------------------------------------------------------------
  auto* dist_cmd = app.add_subcommand(
      "distance",
      "first-column-to-span distance: quadratic-form identity vs QR projection");
  dist_cmd->fallthrough();
  std::string di_in, di_json;
  dist_cmd->add_option("--in", di_in, "matrix file, size at least 2x2")->required();
  dist_cmd->add_option("--json", di_json, "write the result here instead of stdout");
  dist_cmd->callback([&] {
    const rmtsharp::SparseBinaryMatrix a = rmtsharp::load_matrix(di_in);
    const rmtsharp::DistanceInstance inst = rmtsharp::make_distance_instance(a);
    const rmtsharp::QuadFormDistance qf = rmtsharp::distance_via_quadratic_form(inst);
    const double proj = rmtsharp::distance_column_to_span(a, 1);
    nlohmann::json j;
    j["schema_version"] = rmtsharp::kSchemaVersion;
    j["n"] = a.rows();
    j["quad"] = qf.value;
    j["exact"] = qf.exact;
    j["projection"] = proj;
    j["gap"] = std::fabs(qf.value - proj);
    emit_or_print(j, di_json, out_dir);
  });

  // --- run --------------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config");
  run_cmd->fallthrough();
  std::string rn_config, rn_out, rn_agg;
  std::vector<std::string> rn_sets;
  run_cmd->add_option("--config", rn_config, "JSON config path")->required();
  run_cmd->add_option("--set", rn_sets, "key=value override, may repeat");
  run_cmd->add_option("--out", rn_out, "override the CSV output path");
  run_cmd->add_option("--aggregate", rn_agg, "also write the aggregate JSON here");
  run_cmd->callback([&] {
    rmtsharp::ExperimentConfig cfg = rmtsharp::load_config(rn_config);
    for (const std::string& s : rn_sets) {
      rmtsharp::apply_override(cfg, s);
      if (verbosity > 0) std::cerr << "override: " << s << '\n';
    }
    if (!rn_out.empty()) cfg.output = rn_out;
    if (cfg.output.empty())
      cfg.output = std::string(rmtsharp::to_string(cfg.experiment)) + "_records.csv";
    const std::vector<rmtsharp::TrialRecord> records = rmtsharp::run_experiment(cfg);
    const std::string csv_path = joined(out_dir, cfg.output);
    rmtsharp::emit_csv(records, csv_path, cfg.record_wall_time);
    if (verbosity > 0)
      std::cerr << "wrote " << csv_path << " (" << records.size() << " records)\n";
    if (!rn_agg.empty()) {
      const rmtsharp::AggregateReport report = rmtsharp::aggregate(records);
      const std::string agg_path = joined(out_dir, rn_agg);
      rmtsharp::emit_json(rmtsharp::aggregate_to_json(report), agg_path);
      if (verbosity > 0) std::cerr << "wrote " << agg_path << '\n';
    }
  });

  // --- aggregate ----------------------------------------------------------------
  auto* agg_cmd =
      app.add_subcommand("aggregate", "summarize a record CSV into grouped statistics");
  agg_cmd->fallthrough();
  std::string ag_in, ag_out;
  agg_cmd->add_option("--in", ag_in, "record CSV produced by `run`")->required();
  agg_cmd->add_option("--out", ag_out, "write the JSON here instead of stdout");
  agg_cmd->callback([&] {
    const std::vector<rmtsharp::TrialRecord> records = rmtsharp::load_csv(ag_in);
    const rmtsharp::AggregateReport report = rmtsharp::aggregate(records);
    emit_or_print(rmtsharp::aggregate_to_json(report), ag_out, out_dir);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help or the usage message
    return rc == 0 ? 0 : 2;
  } catch (const rmtsharp::parameter_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const rmtsharp::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const rmtsharp::convergence_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
