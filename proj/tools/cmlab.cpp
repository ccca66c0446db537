// cmlab - command-line front end for the cumulative-memory laboratory.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmlab/blocks.hpp"
#include "cmlab/bounds.hpp"
#include "cmlab/bprog.hpp"
#include "cmlab/dag.hpp"
#include "cmlab/experiment.hpp"
#include "cmlab/hashgraph.hpp"
#include "cmlab/loss.hpp"
#include "cmlab/opt.hpp"
#include "cmlab/pebbling.hpp"
#include "cmlab/problems.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void save_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<long long> load_widths_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<long long> widths;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("step", 0) == 0) continue;
        auto comma = line.find(',');
        widths.push_back(std::stoll(comma == std::string::npos ? line : line.substr(comma + 1)));
    }
    return widths;
}

cmlab::MonotoneFunction parse_family(const std::string& name) {
    if (name == "identity") return cmlab::identity_function();
    if (name == "logplus") return cmlab::logplus_function();
    if (name == "one") return cmlab::constant_one_function();
    if (name.rfind("power:", 0) == 0) return cmlab::power_function(std::stod(name.substr(6)));
    if (name.rfind("custom-table:", 0) == 0) {
        std::ifstream in(name.substr(13));
        if (!in) throw std::runtime_error("cannot open table " + name.substr(13));
        std::vector<std::pair<double, double>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("s,", 0) == 0) continue;
            auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        }
        return cmlab::table_function(std::move(rows));
    }
    throw std::runtime_error("unknown function family '" + name + "'");
}

cmlab::Matrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    cmlab::Matrix m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<int> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(std::stoi(tok));
        if (!row.empty()) m.push_back(std::move(row));
    }
    return m;
}

std::string decomposition_report(const cmlab::BlockDecomposition& bd) {
    nlohmann::json j;
    j["boundaries"] = bd.boundaries;
    j["boundary_log_width"] = bd.boundary_log_width;
    j["unit"] = bd.unit;
    if (!bd.segments_consumed.empty()) j["segments_consumed"] = bd.segments_consumed;
    if (!bd.output_targets.empty()) j["output_targets"] = bd.output_targets;
    if (!bd.kstar.empty()) j["kstar"] = bd.kstar;
    j["certified_area"] = bd.certified_area();
    return j.dump(2) + "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale laboratory for cumulative-memory complexity"};
    app.require_subcommand(1);
    app.fallthrough();

    uint64_t seed = 1;
    std::string out_path;
    std::string format = "json";
    app.add_option("--seed", seed, "global RNG seed")->capture_default_str();
    app.add_option("--out", out_path, "output file ('-' for stdout)");
    app.add_option("--format", format, "csv or json")->capture_default_str();

    // dag
    auto* dag_cmd = app.add_subcommand("dag", "graph generators");
    auto* dag_gen = dag_cmd->add_subcommand("gen", "generate a graph family member");
    std::string family = "chain";
    long long param = 1;
    dag_gen->add_option("--family", family, "chain|pyramid|lattice|sep")->required();
    dag_gen->add_option("--param", param, "size parameter")->required();
    dag_gen->callback([&] {
        cmlab::Dag d;
        if (family == "chain") d = cmlab::make_chain(static_cast<int>(param));
        else if (family == "pyramid") d = cmlab::make_pyramid(static_cast<int>(param));
        else if (family == "lattice") d = cmlab::make_lattice(static_cast<int>(param));
        else if (family == "sep") d = cmlab::make_separation_graph(param);
        else throw CLI::ValidationError("--family", "unknown family");
        save_text(out_path, cmlab::dag_to_json(d).dump(2) + "\n");
    });

    // pebble
    auto* pebble = app.add_subcommand("pebble", "black pebble game");
    std::string graph_path, trace_path, csv_path, search_mode = "pebbles";
    int budget = 16;
    auto* pebble_run = pebble->add_subcommand("run", "replay a trace and report metrics");
    pebble_run->add_option("--graph", graph_path)->required();
    pebble_run->add_option("--trace", trace_path)->required();
    pebble_run->add_option("--csv", csv_path, "per-step pebble counts");
    pebble_run->callback([&] {
        cmlab::Dag d = cmlab::dag_from_json(load_json(graph_path));
        cmlab::PebblingTrace t = cmlab::trace_from_json(load_json(trace_path));
        cmlab::PebblingMetrics m = cmlab::run(d, t);
        if (!csv_path.empty()) {
            std::ostringstream os;
            os << "step,pebbles\n";
            cmlab::PebbleSet st;
            for (size_t i = 0; i < t.size(); ++i) {
                st = cmlab::step(st, t[i], d);
                os << i + 1 << "," << st.size() << "\n";
            }
            save_text(csv_path, os.str());
        }
        nlohmann::json j{{"time", m.time},
                         {"max_pebbles", m.max_pebbles},
                         {"cm", m.cm},
                         {"reached_targets", m.reached_targets}};
        save_text(out_path, j.dump(2) + "\n");
    });
    auto* pebble_search = pebble->add_subcommand("search", "exhaustive optima on tiny graphs");
    pebble_search->add_option("--graph", graph_path)->required();
    pebble_search->add_option("--mode", search_mode, "pebbles|cm");
    pebble_search->add_option("--budget", budget, "pebble or move budget");
    pebble_search->callback([&] {
        cmlab::Dag d = cmlab::dag_from_json(load_json(graph_path));
        nlohmann::json j;
        if (search_mode == "pebbles") {
            auto r = cmlab::min_pebbles_exhaustive(d, budget);
            j["min_pebbles"] = r ? nlohmann::json(*r) : nlohmann::json("exhausted");
        } else {
            auto r = cmlab::min_cm_exhaustive(d, budget);
            j["min_cm"] = r ? nlohmann::json(*r) : nlohmann::json("exhausted");
        }
        save_text(out_path, j.dump(2) + "\n");
    });
    auto* pebble_strategy = pebble->add_subcommand("strategy", "emit the separation strategy");
    long long sep_n = 27;
    pebble_strategy->add_option("--n", sep_n, "separation parameter (perfect cube)")->required();
    pebble_strategy->callback([&] {
        save_text(out_path, cmlab::trace_to_json(cmlab::strategy_separation(sep_n)).dump() + "\n");
    });

    // hashgraph
    auto* hg = app.add_subcommand("hashgraph", "hash-graph labeling");
    auto* hg_eval = hg->add_subcommand("eval", "evaluate via a pebbling strategy");
    int hg_c = 4;
    std::string mem_csv;
    hg_eval->add_option("--graph", graph_path)->required();
    hg_eval->add_option("--trace", trace_path)->required();
    hg_eval->add_option("--c", hg_c, "security multiplier")->capture_default_str();
    hg_eval->add_option("--mem-csv", mem_csv, "per-step resident bits");
    hg_eval->callback([&] {
        cmlab::Dag d = cmlab::dag_from_json(load_json(graph_path));
        cmlab::HashGraphInstance inst(d, hg_c, seed);
        auto ev = cmlab::evaluate_with_strategy(inst, cmlab::trace_from_json(load_json(trace_path)));
        if (!mem_csv.empty()) {
            std::ostringstream os;
            os << "step,resident_bits\n";
            for (size_t i = 0; i < ev.memory_bits.size(); ++i)
                os << i + 1 << "," << ev.memory_bits[i] << "\n";
            save_text(mem_csv, os.str());
        }
        auto rep = cmlab::audit(ev.queries, inst);
        nlohmann::json j{{"target_label", ev.target_label.hex()},
                         {"label_bits", inst.label_bits()},
                         {"queries", ev.queries.steps.size()},
                         {"audit_clean", rep.clean()},
                         {"extracted_max_pebbles", rep.extracted_max_pebbles}};
        save_text(out_path, j.dump(2) + "\n");
    });

    // bp
    auto* bp = app.add_subcommand("bp", "layered branching programs");
    std::string prog_path, input_csv, widths_path, blocks_mode = "simple", h0_name = "one";
    long long block_H = 1;
    double bp_beta = 1, bp_n = 1, bp_K = 2, bp_C = 1, bp_alpha = 1, bp_cexp = 0, bp_h1 = 2;
    auto* bp_run = bp->add_subcommand("run", "evaluate a program on one input");
    bp_run->add_option("--prog", prog_path)->required();
    bp_run->add_option("--input", input_csv, "comma-separated values")->required();
    bp_run->callback([&] {
        auto p = cmlab::bp_from_json(load_json(prog_path));
        auto r = cmlab::run(p, parse_int_list(input_csv));
        nlohmann::json j;
        j["outputs"] = r.outputs;
        j["path"] = r.path;
        save_text(out_path, j.dump(2) + "\n");
    });
    auto* bp_metrics = bp->add_subcommand("metrics", "T, S and CM of a program");
    std::string widths_csv_out;
    bp_metrics->add_option("--prog", prog_path)->required();
    bp_metrics->add_option("--widths-csv", widths_csv_out, "emit the width profile");
    bp_metrics->callback([&] {
        auto c = cmlab::metrics(cmlab::bp_from_json(load_json(prog_path)));
        if (!widths_csv_out.empty()) {
            std::ostringstream os;
            os << "step,width\n";
            for (size_t t = 0; t < c.widths.size(); ++t) os << t << "," << c.widths[t] << "\n";
            save_text(widths_csv_out, os.str());
        }
        nlohmann::json j{{"T", c.time}, {"S", c.space}, {"CM", c.cm}, {"widths", c.widths}};
        save_text(out_path, j.dump(2) + "\n");
    });
    auto* bp_blocks = bp->add_subcommand("blocks", "decompose a width profile");
    bp_blocks->add_option("--widths", widths_path, "CSV width profile")->required();
    bp_blocks->add_option("--mode", blocks_mode, "simple|adaptive|exp");
    bp_blocks->add_option("--H", block_H, "segment length (simple)");
    bp_blocks->add_option("--h0", h0_name, "height shape (adaptive)");
    bp_blocks->add_option("--h1", bp_h1, "block unit h1(n) (adaptive)");
    bp_blocks->add_option("--K", bp_K);
    bp_blocks->add_option("--C", bp_C);
    bp_blocks->add_option("--alpha", bp_alpha);
    bp_blocks->add_option("--c-exp", bp_cexp);
    bp_blocks->add_option("--beta", bp_beta, "interval scale (exp)");
    bp_blocks->add_option("--n", bp_n, "input size (exp)");
    bp_blocks->callback([&] {
        auto widths = load_widths_csv(widths_path);
        cmlab::BlockDecomposition bd;
        if (blocks_mode == "simple") {
            bd = cmlab::simple_blocks(widths, block_H);
        } else if (blocks_mode == "adaptive") {
            auto h0 = parse_family(h0_name);
            bd = cmlab::adaptive_blocks(widths, h0.eval, bp_h1, bp_K, bp_C, bp_alpha, bp_cexp);
        } else if (blocks_mode == "exp") {
            std::vector<double> space;
            space.reserve(widths.size());
            for (long long w : widths) space.push_back(std::log2(static_cast<double>(w)));
            bd = cmlab::exp_blocks(space, bp_beta, bp_n);
        } else {
            throw CLI::ValidationError("--mode", "unknown mode");
        }
        save_text(out_path, decomposition_report(bd));
    });

    // rect
    auto* rect = app.add_subcommand("rect", "embedded rectangle search");
    auto* rect_search = rect->add_subcommand("search", "maximize alpha over rectangles");
    std::string rect_fn = "ed";
    int rect_n = 2, rect_N = 4, rect_m = 1;
    rect_search->add_option("--fn", rect_fn, "ed|ham|const1");
    rect_search->add_option("--n", rect_n)->required();
    rect_search->add_option("--N", rect_N)->required();
    rect_search->add_option("--m", rect_m)->required();
    rect_search->callback([&] {
        std::function<int(const std::vector<int>&)> f;
        if (rect_fn == "ed") f = [](const std::vector<int>& x) { return cmlab::element_distinct(x); };
        else if (rect_fn == "ham") {
            long long N = rect_N;
            f = [N](const std::vector<int>& x) { return cmlab::hamming_close(x, N); };
        } else if (rect_fn == "const1") f = [](const std::vector<int>&) { return 1; };
        else throw CLI::ValidationError("--fn", "unknown function");
        auto r = cmlab::max_alpha_search(f, rect_n, rect_N, rect_m);
        nlohmann::json j{{"best_min_side", r.best_min_side},
                         {"denom", r.denom},
                         {"alpha", r.alpha},
                         {"coords_a", r.witness.coords_a},
                         {"coords_b", r.witness.coords_b}};
        save_text(out_path, j.dump(2) + "\n");
    });
    auto* rect_rigid = rect->add_subcommand("rigid", "exhaustive matrix rigidity check");
    std::string matrix_path;
    int rg = 1, rh = 0, rmod = 2;
    double rc = 1.0;
    rect_rigid->add_option("--matrix", matrix_path, "CSV matrix")->required();
    rect_rigid->add_option("--g", rg, "row budget")->capture_default_str();
    rect_rigid->add_option("--hdim", rh, "column removal budget")->capture_default_str();
    rect_rigid->add_option("--c", rc, "rank fraction")->capture_default_str();
    rect_rigid->add_option("--mod", rmod, "prime field modulus")->capture_default_str();
    rect_rigid->callback([&] {
        cmlab::Matrix m = load_matrix_csv(matrix_path);
        bool rigid = cmlab::is_rigid(m, rg, rh, rc, rmod);
        nlohmann::json j{{"rows", m.size()},
                         {"cols", m.empty() ? 0 : m[0].size()},
                         {"g", rg},
                         {"h", rh},
                         {"c", rc},
                         {"rigid", rigid}};
        save_text(out_path, j.dump(2) + "\n");
    });

    // loss
    auto* loss_cmd = app.add_subcommand("loss", "loss function of a height budget");
    auto* loss_compute = loss_cmd->add_subcommand("compute", "evaluate L_p(n)");
    std::string loss_family = "identity";
    double loss_n = 16;
    loss_compute->add_option("--family", loss_family, "power:c|logplus|identity");
    loss_compute->add_option("--n", loss_n)->required();
    loss_compute->callback([&] {
        auto p = parse_family(loss_family);
        auto rep = cmlab::loss_bounds_check(p, loss_n, 2.0);
        if (format == "csv") {
            std::ostringstream os;
            os << "family,n,loss,lower_a,part_c_bound,bounds_pass\n"
               << p.name << "," << loss_n << "," << rep.loss_value << ","
               << 1.0 / p.eval(loss_n) << "," << rep.part_c_bound << "," << rep.all_pass()
               << "\n";
            save_text(out_path, os.str());
            return;
        }
        nlohmann::json j{{"family", p.name},
                         {"n", loss_n},
                         {"loss", rep.loss_value},
                         {"lower_a", 1.0 / p.eval(loss_n)},
                         {"part_c_bound", rep.part_c_bound},
                         {"bounds_pass", rep.all_pass()}};
        save_text(out_path, j.dump(2) + "\n");
    });

    // opt
    auto* opt_cmd = app.add_subcommand("opt", "optimization lemma oracles");
    auto* opt_fuzz = opt_cmd->add_subcommand("fuzz", "randomized lemma checking");
    std::string lemma = "c1";
    long long iters = 100000;
    opt_fuzz->add_option("--lemma", lemma, "c1|c2");
    opt_fuzz->add_option("--iters", iters)->capture_default_str();
    opt_fuzz->callback([&] {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> len(1, 32);
        std::uniform_real_distribution<double> mag(-3.0, 3.0);
        long long checked = 0, violations = 0;
        cmlab::ConcaveRatioFunction f("sqrt", [](double x) { return std::sqrt(x); });
        for (long long i = 0; i < iters; ++i) {
            std::vector<double> xs(len(rng));
            for (double& x : xs) x = std::pow(10.0, mag(rng));
            if (lemma == "c1") {
                auto c = cmlab::check_moment(xs);
                if (c.verdict != cmlab::Verdict::HypothesesNotMet) ++checked;
                if (c.verdict == cmlab::Verdict::Violated) ++violations;
            } else {
                double sum = 0, sump = 0;
                for (double x : xs) {
                    sum += x;
                    sump += f.p(x);
                }
                auto c = cmlab::check_concave_bound(xs, f, sum, sump);
                if (c.verdict != cmlab::Verdict::HypothesesNotMet) ++checked;
                if (c.verdict == cmlab::Verdict::Violated) ++violations;
            }
        }
        nlohmann::json j{{"lemma", lemma}, {"iters", iters}, {"checked", checked},
                         {"violations", violations}};
        save_text(out_path, j.dump(2) + "\n");
        if (violations) throw std::runtime_error("lemma violations found");
    });

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "closed-form lower bound calculators");
    auto* bounds_compute = bounds_cmd->add_subcommand("compute", "evaluate one application bound");
    std::string bound_tag = "qsort";
    double b_n = 256, b_T = 4096, b_beta = 1, b_d = 2, b_k = 16, b_g = 0, b_h = 0, b_delta = 0;
    bool b_explicit = false;
    bounds_compute->add_option("--tag", bound_tag)->required();
    bounds_compute->add_option("--n", b_n);
    bounds_compute->add_option("--T", b_T);
    bounds_compute->add_option("--beta", b_beta);
    bounds_compute->add_option("--d", b_d);
    bounds_compute->add_option("--k", b_k);
    bounds_compute->add_option("--gdim", b_g, "rigidity row budget g");
    bounds_compute->add_option("--hdim", b_h, "rigidity column budget h");
    bounds_compute->add_option("--delta", b_delta);
    bounds_compute->add_flag("--explicit", b_explicit, "explicit constant mode (ham/ed)");
    bounds_compute->callback([&] {
        std::map<std::string, double> params{{"n", b_n},   {"T", b_T},     {"beta", b_beta},
                                             {"d", b_d},   {"k", b_k},     {"g", b_g},
                                             {"h", b_h},   {"delta", b_delta},
                                             {"N", b_n * b_n}};
        if (b_explicit) params["explicit"] = 1;
        auto r = cmlab::cm_applications(bound_tag, params);
        if (format == "csv") {
            std::ostringstream os;
            os << "tag,value,log2_value,branch\n"
               << bound_tag << "," << r.value << "," << r.log2_value << "," << r.branch << "\n";
            save_text(out_path, os.str());
            return;
        }
        nlohmann::json j{{"tag", bound_tag},
                         {"value", r.value},
                         {"log2_value", r.log2_value},
                         {"branch", r.branch},
                         {"provenance", r.provenance},
                         {"precondition_ok", r.precondition_ok}};
        if (!r.precondition_note.empty()) j["precondition_note"] = r.precondition_note;
        save_text(out_path, j.dump(2) + "\n");
    });

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "batch experiment runner");
    auto* exp_run = exp_cmd->add_subcommand("run", "run one named experiment");
    std::string exp_tag = "pebble-separation", exp_out = "experiments";
    exp_run->add_option("--tag", exp_tag,
                        "pebble-separation|loss-sweep|opt-fuzz|rect-ed|sort-cm-harness|"
                        "hashgraph-audit|bounds-table")
        ->required();
    exp_run->add_option("--dir", exp_out, "output directory")->capture_default_str();
    exp_run->callback([&] {
        cmlab::ExperimentConfig cfg{exp_tag, seed, exp_out, format};
        auto r = cmlab::run_experiment(cfg);
        for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
        if (!r.passed) {
            for (const auto& f : r.failures) std::cerr << "FAIL: " << f << "\n";
            throw std::runtime_error("experiment assertions failed");
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
