// Command-line driver for the weighted Voronoi experiments.

#include "mwv/mwv.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

struct StageError : std::runtime_error
{
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + " failed: " + what)
    {
    }
};

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f())
{
    try
    {
        return f();
    }
    catch(const StageError&)
    {
        throw;
    }
    catch(const std::exception& e)
    {
        throw StageError(name, e.what());
    }
}

struct InstanceOptions
{
    std::string sites;
    std::size_t n = 20;
    std::string model = "iid:uniform:1:2";
    std::uint64_t seed = 1;
    double jitter = 0.0;
    double box_factor = 2.0;
};

void add_instance_options(CLI::App* app, InstanceOptions& o)
{
    app->add_option("--sites", o.sites, "CSV file with header x,y or x,y,weight");
    app->add_option("--n", o.n, "number of random sites when no file is given")->check(CLI::PositiveNumber);
    app->add_option("--model", o.model, "weight model, e.g. iid:uniform:1:2, permuted:1,2,3");
    app->add_option("--seed", o.seed, "seed");
    app->add_option("--jitter", o.jitter, "perturb site locations by up to this much")->check(CLI::NonNegativeNumber);
    app->add_option("--box-factor", o.box_factor, "world box inflation")->check(CLI::Range(1.0, 1e6));
}

mwv::Ordering build_instance(const InstanceOptions& o)
{
    using namespace mwv;
    Rng rng(o.seed);
    const ModelSpec spec = parse_model_spec(o.model);
    std::vector<Point> pts;
    std::vector<double> weights;
    if(!o.sites.empty())
    {
        SiteFile f = read_sites(o.sites);
        pts = std::move(f.locations);
        weights = std::move(f.weights);
    }
    else
    {
        if(spec.kind == ModelSpec::Kind::Locations)
            throw Error("model 'locations:unit-square' needs --sites with a weight column");
        pts = uniform_points(o.n, {0.0, 0.0, 1.0, 1.0}, rng);
    }
    if(pts.empty())
        throw Error("instance has no sites");

    Ordering ord;
    if(!weights.empty() && spec.kind != ModelSpec::Kind::Locations)
    {
        std::vector<Site> sites(pts.size());
        for(std::size_t k = 0; k < sites.size(); ++k)
            sites[k] = {pts[k], weights[k], 0, rng.uniform()};
        ord = Ordering::from_sites(std::move(sites));
    }
    else
        ord = sample_ordering(pts, instantiate(spec, pts.size(), &weights), rng);

    if(o.jitter > 0.0)
    {
        Rng jr(Rng::derive(o.seed, 1));
        const JitterResult j = jitter(ord.locations(), o.jitter, jr);
        std::cerr << "jitter: seed " << j.seed << " magnitude " << j.magnitude << "\n";
        std::vector<Site> sites = ord.sites();
        for(std::size_t k = 0; k < sites.size(); ++k)
            sites[k].location = j.points[k];
        ord = Ordering::from_sites(std::move(sites));
    }
    return ord;
}

nlohmann::json instance_meta(const mwv::Ordering& ord, const InstanceOptions& o)
{
    nlohmann::json sites = nlohmann::json::array();
    for(const mwv::Site& s : ord.sites())
        sites.push_back({{"x", s.location.x}, {"y", s.location.y}, {"weight", s.weight}, {"rank", s.rank}});
    return {{"n", ord.size()}, {"seed", o.seed}, {"model", o.model}, {"ordering", sites}};
}

void write_json(const nlohmann::json& j, const std::string& path)
{
    if(path.empty())
    {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if(!f)
        throw mwv::Error("cannot write '" + path + "'");
    f << j.dump(2) << "\n";
}

std::vector<std::size_t> parse_n_list(const std::vector<std::string>& tokens)
{
    std::vector<std::size_t> out;
    for(const std::string& t : tokens)
        for(const std::string& part : mwv::detail::split(t, ','))
        {
            const double v = mwv::detail::parse_number(part, "--n");
            if(!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
                throw mwv::Error("--n values must be positive integers");
            out.push_back(static_cast<std::size_t>(v));
        }
    return out;
}

int run_experiment_command(mwv::ExperimentConfig cfg, const std::string& sites)
{
    using namespace mwv;
    stage("arguments", [&] {
        if(!sites.empty())
        {
            const SiteFile f = read_sites(sites);
            if(f.weights.empty())
                throw Error("--sites for an experiment must have a weight column");
            cfg.file_weights = f.weights;
        }
        validate(cfg);
        return 0;
    });
    const auto records = stage("experiment", [&] { return run_experiment(cfg, &std::cerr); });
    const CountField field = primary_field(cfg.kind);
    std::optional<GrowthFit> fit;
    if(cfg.n.size() >= 3)
        fit = stage("growth fit", [&] { return fit_growth(records, field); });
    const auto paths = stage("report", [&] { return emit_report(records, fit, cfg); });

    for(const SampleStats& s : per_n_stats(records, field))
        std::printf("n=%zu trials=%zu mean %s=%.4f stderr=%.4f\n", s.n, s.count, to_string(field), s.mean, s.stderr_);
    if(fit)
    {
        for(const DoublingRatio& d : fit->doubling)
            std::printf("doubling %zu->%zu: %.4f\n", d.from, d.to, d.ratio);
        if(fit->best)
            std::printf("best law: %s\n", law_name(*fit->best));
        else
            std::printf("best law: none (degenerate series)\n");
    }
    std::printf("wrote %s, %s%s%s\n", paths.csv.string().c_str(), paths.json.string().c_str(),
                paths.svg.empty() ? "" : ", ", paths.svg.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multiplicative weighted Voronoi diagrams via prefix Voronoi cells"};
    app.require_subcommand(1);

    // experiment / lowerbound
    mwv::ExperimentConfig cfg;
    std::vector<std::string> n_tokens;
    std::string kind = "overlay";
    std::string exp_sites;
    bool no_timing = false;
    auto add_experiment_options = [&](CLI::App* c, bool with_kind) {
        if(with_kind)
            c->add_option("--kind", kind, "overlay | diagram | candidate | minima | lowerbound | envelope");
        c->add_option("--n", n_tokens, "instance sizes, e.g. 64,128,256");
        c->add_option("--trials", cfg.trials, "trials per n")->check(CLI::PositiveNumber);
        c->add_option("--model", cfg.model, "weight model");
        c->add_option("--seed", cfg.seed, "master seed");
        c->add_option("--out", cfg.out, "output directory");
        c->add_option("--jitter", cfg.jitter, "jitter magnitude (0: only when retrying)")->check(CLI::NonNegativeNumber);
        c->add_option("--box-factor", cfg.box_factor, "world box inflation")->check(CLI::Range(1.0, 1e6));
        c->add_option("--sites", exp_sites, "x,y,weight file supplying weights for locations:unit-square");
        c->add_option("--threads", cfg.threads, "worker threads (0: all cores)");
        c->add_flag("--no-timing", no_timing, "leave wall_ms empty so reruns are byte-identical");
    };
    CLI::App* experiment = app.add_subcommand("experiment", "run trials and write CSV/JSON/SVG reports");
    add_experiment_options(experiment, true);
    CLI::App* lowerbound = app.add_subcommand("lowerbound", "overlay growth on the two-row lower-bound instance");
    add_experiment_options(lowerbound, false);

    InstanceOptions inst;
    std::string out_path;
    bool brute = false;
    CLI::App* diagram = app.add_subcommand("diagram", "weighted diagram vertices of one instance as JSON");
    add_instance_options(diagram, inst);
    diagram->add_option("--out", out_path, "output file (default: stdout)");
    diagram->add_flag("--brute", brute, "use the exhaustive triple oracle");

    CLI::App* dump = app.add_subcommand("dump-overlay", "overlay arrangement of one instance as JSON");
    add_instance_options(dump, inst);
    dump->add_option("--out", out_path, "output file (default: stdout)");

    std::vector<std::string> points;
    CLI::App* query = app.add_subcommand("query", "weighted nearest site through the candidate set");
    add_instance_options(query, inst);
    query->add_option("--point", points, "query point x,y (repeatable)")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        using namespace mwv;
        if(experiment->parsed() || lowerbound->parsed())
        {
            stage("arguments", [&] {
                cfg.kind = lowerbound->parsed() ? ExperimentKind::LowerBound : parse_kind(kind);
                cfg.n = n_tokens.empty() ? std::vector<std::size_t>{64, 128, 256} : parse_n_list(n_tokens);
                cfg.timing = !no_timing;
                if(lowerbound->parsed() && experiment->count("--model") == 0 && lowerbound->count("--model") == 0)
                    cfg.model = "permuted:1";
                return 0;
            });
            return run_experiment_command(cfg, exp_sites);
        }

        const Ordering ord = stage("instance", [&] { return build_instance(inst); });
        WorldBoxOptions opts;
        opts.factor = inst.box_factor;
        opts.diagram_features = true;

        if(diagram->parsed())
        {
            const MWVDiagram d = stage("diagram", [&] {
                if(brute)
                    return brute_force_diagram(ord);
                const Box box = compute_world_box(ord, opts);
                return fast_diagram(ord, build_overlay(all_prefix_cells(ord, box)));
            });
            stage("report", [&] {
                write_json(diagram_json(d, instance_meta(ord, inst)), out_path);
                return 0;
            });
            return 0;
        }

        const OverlayArrangement A = stage("overlay", [&] {
            return build_overlay(all_prefix_cells(ord, compute_world_box(ord, opts)));
        });
        if(dump->parsed())
        {
            stage("report", [&] {
                write_json(overlay_json(A, instance_meta(ord, inst)), out_path);
                return 0;
            });
            return 0;
        }

        for(const std::string& s : points)
        {
            const Point x = stage("arguments", [&] {
                const auto f = detail::split(s, ',');
                if(f.size() != 2)
                    throw Error("--point expects x,y");
                return Point{detail::parse_number(f[0], "--point"), detail::parse_number(f[1], "--point")};
            });
            const QueryResult r = stage("query", [&] { return locate(x, A, ord); });
            const QueryResult check = nearest_weighted_site(x, ord);
            std::string cand;
            for(std::size_t k : r.candidates.ranks)
                cand += (cand.empty() ? "" : ",") + std::to_string(k);
            std::printf("%.17g,%.17g rank=%zu value=%.17g candidates={%s} exhaustive_rank=%zu\n",
                        x.x, x.y, r.rank, r.value, cand.c_str(), check.rank);
        }
        return 0;
    }
    catch(const StageError& e)
    {
        std::cerr << "mwv: " << e.what() << "\n";
        return 1;
    }
    catch(const std::exception& e)
    {
        std::cerr << "mwv: " << e.what() << "\n";
        return 1;
    }
}
