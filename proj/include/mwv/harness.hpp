#ifndef MWV_HARNESS_HPP
#define MWV_HARNESS_HPP

/**
 * @file
 * Experiment driver: trials over (n, model, seed), growth fits, and
 * CSV / JSON / SVG reports.
 */

#include "geometry.hpp"
#include "models.hpp"
#include "mwvd.hpp"
#include "overlay.hpp"
#include "prefix_cells.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace mwv
{

//------------------------------------------------------------------------------
// Model specifications
//------------------------------------------------------------------------------

/// Parsed weight-model string. `permuted` and `locations` lists are tiled
/// to the instance size when shorter.
struct ModelSpec
{
    enum class Kind
    {
        Iid,
        Permuted,
        Locations
    };

    std::string text;
    Kind kind = Kind::Iid;
    WeightDistribution distribution = UniformWeights{1.0, 2.0};
    std::vector<double> values;
};

namespace detail
{

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while(std::getline(in, cur, sep))
        out.push_back(cur);
    if(!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

inline double parse_number(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(s, &used);
    }
    catch(const std::exception&)
    {
        used = 0;
    }
    if(used == 0 || used != s.size() || !std::isfinite(v))
        throw Error("invalid number '" + s + "' in " + what);
    return v;
}

inline std::vector<double> parse_positive_list(const std::string& s, const std::string& what)
{
    std::vector<double> out;
    for(const std::string& tok : split(s, ','))
    {
        const double v = parse_number(tok, what);
        if(!(v > 0.0))
            throw Error(what + ": weights must be positive");
        out.push_back(v);
    }
    if(out.empty())
        throw Error(what + ": empty value list");
    return out;
}

inline std::vector<double> tile(const std::vector<double>& v, std::size_t n, const std::string& what)
{
    if(v.size() > n)
        throw Error(what + ": " + std::to_string(v.size()) + " weights for " + std::to_string(n) + " sites");
    std::vector<double> out(n);
    for(std::size_t k = 0; k < n; ++k)
        out[k] = v[k % v.size()];
    return out;
}

} // namespace detail

/// Grammar: iid:uniform:a:b | iid:exp:lambda | iid:discrete:v1,v2,... |
/// permuted:v1,v2,... | locations:unit-square
inline ModelSpec parse_model_spec(const std::string& text)
{
    ModelSpec m;
    m.text = text;
    const auto parts = detail::split(text, ':');
    const auto bad = [&]() { return Error("unrecognized weight model '" + text + "'"); };
    if(parts.empty())
        throw bad();
    if(parts[0] == "iid")
    {
        m.kind = ModelSpec::Kind::Iid;
        if(parts.size() == 4 && parts[1] == "uniform")
        {
            const double a = detail::parse_number(parts[2], text);
            const double b = detail::parse_number(parts[3], text);
            if(!(a > 0.0) || !(b > a))
                throw Error("iid:uniform:a:b requires 0 < a < b");
            m.distribution = UniformWeights{a, b};
        }
        else if(parts.size() == 3 && parts[1] == "exp")
        {
            const double lambda = detail::parse_number(parts[2], text);
            if(!(lambda > 0.0))
                throw Error("iid:exp:lambda requires lambda > 0");
            m.distribution = ExponentialWeights{lambda};
        }
        else if(parts.size() == 3 && parts[1] == "discrete")
            m.distribution = DiscreteWeights{detail::parse_positive_list(parts[2], text)};
        else
            throw bad();
    }
    else if(parts[0] == "permuted" && parts.size() == 2)
    {
        m.kind = ModelSpec::Kind::Permuted;
        m.values = detail::parse_positive_list(parts[1], text);
    }
    else if(parts[0] == "locations" && parts.size() == 2 && parts[1] == "unit-square")
        m.kind = ModelSpec::Kind::Locations;
    else
        throw bad();
    return m;
}

/// Concrete model for an instance of `n` sites. `file_weights` supplies the
/// fixed weights of the `locations` model.
inline WeightModel instantiate(const ModelSpec& m, std::size_t n, const std::vector<double>* file_weights = nullptr)
{
    switch(m.kind)
    {
    case ModelSpec::Kind::Iid:
        return IidModel{m.distribution};
    case ModelSpec::Kind::Permuted:
        return PermutedMultiset{detail::tile(m.values, n, m.text)};
    case ModelSpec::Kind::Locations:
    default:
        if(!file_weights || file_weights->empty())
            throw Error("model 'locations:unit-square' needs weights from a sites file");
        return FixedWeightsSampledLocations{detail::tile(*file_weights, n, m.text), Box{0.0, 0.0, 1.0, 1.0}};
    }
}

//------------------------------------------------------------------------------
// Site files
//------------------------------------------------------------------------------

struct SiteFile
{
    std::vector<Point> locations;
    std::vector<double> weights; ///< empty when the file has no weight column
};

/// CSV with header `x,y` or `x,y,weight`.
inline SiteFile read_sites(std::istream& in)
{
    std::string line;
    if(!std::getline(in, line))
        throw Error("sites file is empty");
    if(!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = detail::split(line, ',');
    const bool weighted = header == std::vector<std::string>{"x", "y", "weight"};
    if(!weighted && header != std::vector<std::string>{"x", "y"})
        throw Error("sites file header must be 'x,y' or 'x,y,weight'");
    SiteFile out;
    std::size_t row = 1;
    while(std::getline(in, line))
    {
        ++row;
        if(!line.empty() && line.back() == '\r')
            line.pop_back();
        if(line.empty())
            continue;
        const auto f = detail::split(line, ',');
        const std::string where = "sites file line " + std::to_string(row);
        if(f.size() != header.size())
            throw Error(where + ": expected " + std::to_string(header.size()) + " fields");
        out.locations.push_back({detail::parse_number(f[0], where), detail::parse_number(f[1], where)});
        if(weighted)
        {
            const double w = detail::parse_number(f[2], where);
            if(!(w > 0.0))
                throw Error(where + ": weight must be positive");
            out.weights.push_back(w);
        }
    }
    return out;
}

inline SiteFile read_sites(const std::string& path)
{
    std::ifstream in(path);
    if(!in)
        throw Error("cannot open sites file '" + path + "'");
    return read_sites(in);
}

//------------------------------------------------------------------------------
// Experiments
//------------------------------------------------------------------------------

enum class ExperimentKind
{
    Overlay,
    Diagram,
    Candidate,
    Minima,
    LowerBound,
    Envelope
};

inline const char* to_string(ExperimentKind k)
{
    switch(k)
    {
    case ExperimentKind::Overlay: return "overlay";
    case ExperimentKind::Diagram: return "diagram";
    case ExperimentKind::Candidate: return "candidate";
    case ExperimentKind::Minima: return "minima";
    case ExperimentKind::LowerBound: return "lowerbound";
    case ExperimentKind::Envelope: return "envelope";
    }
    return "?";
}

inline ExperimentKind parse_kind(const std::string& s)
{
    for(ExperimentKind k : {ExperimentKind::Overlay, ExperimentKind::Diagram, ExperimentKind::Candidate,
                            ExperimentKind::Minima, ExperimentKind::LowerBound, ExperimentKind::Envelope})
        if(s == to_string(k))
            return k;
    throw Error("unknown experiment kind '" + s + "'");
}

struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::Overlay;
    std::vector<std::size_t> n;
    std::size_t trials = 1;
    std::string model = "iid:uniform:1:2";
    std::uint64_t seed = 1;
    std::string out;
    double jitter = 0.0; ///< 0: only on retry (always for lowerbound)
    double box_factor = 2.0;
    std::vector<double> file_weights; ///< for the locations model
    bool timing = true;
    unsigned threads = 0; ///< 0: hardware concurrency
    int max_retries = 3;
};

struct TrialRecord
{
    std::size_t trial = 0;
    std::size_t n = 0;
    std::string model;
    std::uint64_t seed = 0;
    std::optional<std::size_t> overlay_v, overlay_e, overlay_f;
    std::optional<std::size_t> max_candidate;
    std::optional<std::size_t> diagram_v;
    std::optional<std::size_t> minima_z;
    std::optional<double> wall_ms;
};

/// Check the configuration before any trial runs.
inline void validate(const ExperimentConfig& cfg)
{
    if(cfg.n.empty())
        throw Error("no n values given");
    for(std::size_t k = 0; k < cfg.n.size(); ++k)
    {
        if(cfg.n[k] == 0)
            throw Error("n values must be positive");
        if(k > 0 && cfg.n[k] <= cfg.n[k - 1])
            throw Error("n values must be strictly ascending");
    }
    if(cfg.trials < 1)
        throw Error("trials must be at least 1");
    if(cfg.jitter < 0.0 || !std::isfinite(cfg.jitter))
        throw Error("jitter must be nonnegative");
    if(!(cfg.box_factor >= 1.0) || !std::isfinite(cfg.box_factor))
        throw Error("box factor must be at least 1");
    const ModelSpec m = parse_model_spec(cfg.model);
    if(m.kind == ModelSpec::Kind::Locations)
    {
        switch(cfg.kind)
        {
        case ExperimentKind::Minima:
        case ExperimentKind::Envelope:
        case ExperimentKind::LowerBound:
            throw Error(std::string("model '") + cfg.model + "' does not apply to kind '" + to_string(cfg.kind) + "'");
        default:
            break;
        }
        if(cfg.file_weights.empty())
            throw Error("model 'locations:unit-square' needs a sites file with a weight column");
        for(std::size_t n : cfg.n)
            instantiate(m, n, &cfg.file_weights);
    }
    if(m.kind == ModelSpec::Kind::Permuted)
        for(std::size_t n : cfg.n)
            instantiate(m, n);
}

namespace detail
{

struct TrialOutcome
{
    std::optional<std::size_t> overlay_v, overlay_e, overlay_f, max_candidate, diagram_v, minima_z;
};

inline TrialOutcome overlay_outcome(const OverlayArrangement& A)
{
    TrialOutcome o;
    o.overlay_v = A.complexity.V;
    o.overlay_e = A.complexity.E;
    o.overlay_f = A.complexity.F;
    o.max_candidate = A.max_candidate_size();
    return o;
}

/// One attempt of one trial. `attempt` > 0 means earlier attempts hit a
/// degeneracy; the instance is then rebuilt and jittered.
inline TrialOutcome run_attempt(
    const ExperimentConfig& cfg, const ModelSpec& spec, std::size_t n, std::uint64_t seed, int attempt)
{
    Rng rng(seed);
    TrialOutcome out;
    switch(cfg.kind)
    {
    case ExperimentKind::Minima:
    {
        std::vector<double> v(n);
        for(double& x : v)
            x = rng.uniform();
        out.minima_z = prefix_minima_count(v);
        return out;
    }
    case ExperimentKind::Envelope:
    {
        std::vector<AffineFunction> fns(n);
        for(AffineFunction& f : fns)
            f = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto perm = rng.permutation(n);
        out.overlay_v = ric_envelope_overlay(fns, perm).total();
        return out;
    }
    default:
        break;
    }

    const bool lowerbound = cfg.kind == ExperimentKind::LowerBound;
    std::vector<Point> pts = lowerbound ? two_row_instance(n) : uniform_points(n, {0.0, 0.0, 1.0, 1.0}, rng);
    const WeightModel model = instantiate(spec, pts.size(), &cfg.file_weights);
    Ordering ord = sample_ordering(pts, model, rng);
    if(lowerbound || cfg.jitter > 0.0 || attempt > 0)
    {
        Rng jr(Rng::derive(seed, static_cast<std::uint64_t>(attempt) + 1));
        const double base = cfg.jitter > 0.0 ? cfg.jitter : min_relative_jitter * ord.scale();
        const double magnitude = base * std::pow(10.0, attempt);
        std::vector<Site> sites = ord.sites();
        std::vector<Point> locs = ord.locations();
        locs = jitter(locs, magnitude, jr).points;
        for(std::size_t k = 0; k < sites.size(); ++k)
            sites[k].location = locs[k];
        ord = Ordering::from_sites(std::move(sites));
    }

    WorldBoxOptions opts;
    opts.factor = cfg.box_factor;
    opts.diagram_features = cfg.kind == ExperimentKind::Diagram;
    const Box box = compute_world_box(ord, opts);
    const OverlayArrangement A = build_overlay(all_prefix_cells(ord, box));
    out = overlay_outcome(A);
    if(cfg.kind == ExperimentKind::Diagram)
    {
        const MWVDiagram d = fast_diagram(ord, A);
        out.diagram_v = d.counts.V;
    }
    return out;
}

} // namespace detail

/// Run every (n, trial) pair. Trial seeds derive from the master seed and
/// the global trial index, so results do not depend on the thread count.
inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr)
{
    validate(cfg);
    const ModelSpec spec = parse_model_spec(cfg.model);
    std::vector<TrialRecord> records(cfg.n.size() * cfg.trials);
    for(std::size_t a = 0; a < cfg.n.size(); ++a)
        for(std::size_t t = 0; t < cfg.trials; ++t)
        {
            const std::size_t idx = a * cfg.trials + t;
            TrialRecord& r = records[idx];
            r.trial = t;
            r.n = cfg.n[a];
            r.model = cfg.model;
            r.seed = Rng::derive(cfg.seed, idx);
        }

    std::atomic<std::size_t> next{0};
    std::vector<std::string> failures(records.size());
    std::vector<std::string> notes(records.size());
    const auto worker = [&]() {
        for(std::size_t idx = next++; idx < records.size(); idx = next++)
        {
            TrialRecord& r = records[idx];
            const auto t0 = std::chrono::steady_clock::now();
            for(int attempt = 0;; ++attempt)
            {
                try
                {
                    const auto o = detail::run_attempt(cfg, spec, r.n, r.seed, attempt);
                    r.overlay_v = o.overlay_v;
                    r.overlay_e = o.overlay_e;
                    r.overlay_f = o.overlay_f;
                    r.max_candidate = o.max_candidate;
                    r.diagram_v = o.diagram_v;
                    r.minima_z = o.minima_z;
                    break;
                }
                catch(const DegeneracyError& e)
                {
                    notes[idx] += "n=" + std::to_string(r.n) + " trial " + std::to_string(r.trial) +
                                  " seed " + std::to_string(r.seed) + " attempt " + std::to_string(attempt) +
                                  ": " + e.what() + "\n";
                    if(attempt >= cfg.max_retries)
                    {
                        failures[idx] = e.what();
                        break;
                    }
                }
                catch(const std::exception& e)
                {
                    failures[idx] = e.what();
                    break;
                }
            }
            if(cfg.timing)
                r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, records.size()));
    std::vector<std::thread> pool;
    for(unsigned k = 1; k < threads; ++k)
        pool.emplace_back(worker);
    worker();
    for(std::thread& t : pool)
        t.join();

    if(log)
        for(const std::string& s : notes)
            *log << s;
    for(std::size_t idx = 0; idx < records.size(); ++idx)
        if(!failures[idx].empty())
            throw Error("trial " + std::to_string(records[idx].trial) + " at n=" + std::to_string(records[idx].n) +
                        " (seed " + std::to_string(records[idx].seed) + ") failed: " + failures[idx]);
    return records;
}

//------------------------------------------------------------------------------
// Growth fits
//------------------------------------------------------------------------------

enum class CountField
{
    OverlayV,
    OverlayE,
    OverlayF,
    MaxCandidate,
    DiagramV,
    MinimaZ
};

inline const char* to_string(CountField f)
{
    switch(f)
    {
    case CountField::OverlayV: return "overlay_v";
    case CountField::OverlayE: return "overlay_e";
    case CountField::OverlayF: return "overlay_f";
    case CountField::MaxCandidate: return "max_candidate";
    case CountField::DiagramV: return "diagram_v";
    case CountField::MinimaZ: return "minima_z";
    }
    return "?";
}

inline std::optional<std::size_t> field_of(const TrialRecord& r, CountField f)
{
    switch(f)
    {
    case CountField::OverlayV: return r.overlay_v;
    case CountField::OverlayE: return r.overlay_e;
    case CountField::OverlayF: return r.overlay_f;
    case CountField::MaxCandidate: return r.max_candidate;
    case CountField::DiagramV: return r.diagram_v;
    case CountField::MinimaZ: return r.minima_z;
    }
    return std::nullopt;
}

/// The count each experiment kind is about.
inline CountField primary_field(ExperimentKind k)
{
    switch(k)
    {
    case ExperimentKind::Diagram: return CountField::DiagramV;
    case ExperimentKind::Candidate: return CountField::MaxCandidate;
    case ExperimentKind::Minima: return CountField::MinimaZ;
    default: return CountField::OverlayV;
    }
}

struct SampleStats
{
    std::size_t n = 0;
    std::size_t count = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Mean and standard error of `f` per n, in ascending n.
inline std::vector<SampleStats> per_n_stats(const std::vector<TrialRecord>& records, CountField f)
{
    std::vector<std::size_t> ns;
    for(const TrialRecord& r : records)
        if(field_of(r, f))
            ns.push_back(r.n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::vector<SampleStats> out;
    for(std::size_t n : ns)
    {
        SampleStats s;
        s.n = n;
        double sum = 0.0;
        for(const TrialRecord& r : records)
            if(r.n == n && field_of(r, f))
            {
                sum += static_cast<double>(*field_of(r, f));
                ++s.count;
            }
        s.mean = sum / static_cast<double>(s.count);
        double ss = 0.0;
        for(const TrialRecord& r : records)
            if(r.n == n && field_of(r, f))
            {
                const double d = static_cast<double>(*field_of(r, f)) - s.mean;
                ss += d * d;
            }
        s.stderr_ = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count)) : 0.0;
        out.push_back(s);
    }
    return out;
}

struct GrowthLaw
{
    std::string name;
    double coefficient = 0.0; ///< c in c * law(n)
    double residual = 0.0;    ///< RMS of log(mean) - log(c * law(n))
};

struct DoublingRatio
{
    std::size_t from = 0;
    std::size_t to = 0;
    double ratio = 0.0;
};

struct GrowthFit
{
    CountField field = CountField::OverlayV;
    std::vector<SampleStats> points;
    std::vector<GrowthLaw> laws; ///< n, n ln n, n ln^2 n, n^2
    std::optional<std::size_t> best;
    bool degenerate = false;
    std::vector<DoublingRatio> doubling;
};

inline double law_value(std::size_t which, double n)
{
    const double l = std::log(n);
    switch(which)
    {
    case 0: return n;
    case 1: return n * l;
    case 2: return n * l * l;
    default: return n * n;
    }
}

inline const char* law_name(std::size_t which)
{
    static const char* names[] = {"n", "n ln n", "n ln^2 n", "n^2"};
    return names[which];
}

/// Least-squares fit of log mean count against each candidate law. A
/// constant or nonpositive series is flagged degenerate and gets no winner.
inline GrowthFit fit_growth(const std::vector<TrialRecord>& records, CountField f)
{
    GrowthFit fit;
    fit.field = f;
    fit.points = per_n_stats(records, f);
    if(fit.points.size() < 3)
        throw Error("growth fit needs at least 3 distinct n values");
    for(std::size_t k = 0; k + 1 < fit.points.size(); ++k)
    {
        const auto& a = fit.points[k];
        const auto& b = fit.points[k + 1];
        fit.doubling.push_back({a.n, b.n, a.mean > 0.0 ? b.mean / a.mean : std::numeric_limits<double>::quiet_NaN()});
    }
    bool constant = true;
    for(const auto& p : fit.points)
    {
        if(!(p.mean > 0.0))
            fit.degenerate = true;
        if(p.mean != fit.points.front().mean)
            constant = false;
    }
    fit.degenerate = fit.degenerate || constant;
    for(std::size_t w = 0; w < 4; ++w)
    {
        GrowthLaw law;
        law.name = law_name(w);
        if(!fit.degenerate)
        {
            double sum = 0.0;
            for(const auto& p : fit.points)
                sum += std::log(p.mean) - std::log(law_value(w, static_cast<double>(p.n)));
            const double logc = sum / static_cast<double>(fit.points.size());
            double ss = 0.0;
            for(const auto& p : fit.points)
            {
                const double r = std::log(p.mean) - logc - std::log(law_value(w, static_cast<double>(p.n)));
                ss += r * r;
            }
            law.coefficient = std::exp(logc);
            law.residual = std::sqrt(ss / static_cast<double>(fit.points.size()));
        }
        fit.laws.push_back(law);
    }
    if(!fit.degenerate)
    {
        std::size_t best = 0;
        for(std::size_t w = 1; w < 4; ++w)
            if(fit.laws[w].residual < fit.laws[best].residual)
                best = w;
        fit.best = best;
    }
    return fit;
}

//------------------------------------------------------------------------------
// Reports
//------------------------------------------------------------------------------

inline const char* csv_header = "trial,n,model,seed,overlay_v,overlay_e,overlay_f,max_candidate,diagram_v,minima_z,wall_ms";

namespace detail
{

inline std::string csv_field(const std::string& s)
{
    if(s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for(char c : s)
    {
        if(c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string opt(const std::optional<std::size_t>& v)
{
    return v ? std::to_string(*v) : std::string();
}

} // namespace detail

inline void write_csv(std::ostream& out, const std::vector<TrialRecord>& records)
{
    out << csv_header << '\n';
    for(const TrialRecord& r : records)
    {
        out << r.trial << ',' << r.n << ',' << detail::csv_field(r.model) << ',' << r.seed << ','
            << detail::opt(r.overlay_v) << ',' << detail::opt(r.overlay_e) << ',' << detail::opt(r.overlay_f) << ','
            << detail::opt(r.max_candidate) << ',' << detail::opt(r.diagram_v) << ',' << detail::opt(r.minima_z) << ',';
        if(r.wall_ms)
        {
            std::ostringstream ms;
            ms << std::fixed << std::setprecision(3) << *r.wall_ms;
            out << ms.str();
        }
        out << '\n';
    }
}

inline nlohmann::json to_json(const ExperimentConfig& cfg)
{
    return {
        {"kind", to_string(cfg.kind)},
        {"n", cfg.n},
        {"trials", cfg.trials},
        {"model", cfg.model},
        {"seed", cfg.seed},
        {"jitter", cfg.jitter},
        {"box_factor", cfg.box_factor}};
}

inline nlohmann::json to_json(const GrowthFit& fit)
{
    nlohmann::json laws = nlohmann::json::array();
    for(const GrowthLaw& l : fit.laws)
        laws.push_back({{"law", l.name}, {"coefficient", l.coefficient}, {"residual", l.residual}});
    nlohmann::json doubling = nlohmann::json::array();
    for(const DoublingRatio& d : fit.doubling)
        doubling.push_back({{"from", d.from}, {"to", d.to}, {"ratio", d.ratio}});
    return {
        {"field", to_string(fit.field)},
        {"laws", laws},
        {"best", fit.best ? nlohmann::json(law_name(*fit.best)) : nlohmann::json(nullptr)},
        {"degenerate", fit.degenerate},
        {"doubling", doubling}};
}

/// {config, per_n: [{n, trials, <field>: {mean, stderr}}...], fit}
inline nlohmann::json summary_json(
    const std::vector<TrialRecord>& records, const std::optional<GrowthFit>& fit, const ExperimentConfig& cfg)
{
    nlohmann::json per_n = nlohmann::json::array();
    std::vector<std::size_t> ns;
    for(const TrialRecord& r : records)
        if(ns.empty() || ns.back() != r.n)
            ns.push_back(r.n);
    for(std::size_t n : ns)
    {
        nlohmann::json entry = {{"n", n}};
        std::size_t trials = 0;
        for(const TrialRecord& r : records)
            trials += r.n == n;
        entry["trials"] = trials;
        for(CountField f : {CountField::OverlayV, CountField::OverlayE, CountField::OverlayF,
                            CountField::MaxCandidate, CountField::DiagramV, CountField::MinimaZ})
            for(const SampleStats& s : per_n_stats(records, f))
                if(s.n == n)
                    entry[to_string(f)] = {{"mean", s.mean}, {"stderr", s.stderr_}};
        per_n.push_back(entry);
    }
    return {
        {"config", to_json(cfg)},
        {"per_n", per_n},
        {"fit", fit ? to_json(*fit) : nlohmann::json(nullptr)}};
}

/// Log-log line chart of the fitted series with the four reference laws.
inline std::string growth_svg(const GrowthFit& fit, const std::string& title)
{
    const double W = 640, H = 440, L = 70, R = 170, T = 40, B = 50;
    std::vector<std::vector<double>> series;
    std::vector<double> xs;
    for(const auto& p : fit.points)
        xs.push_back(static_cast<double>(p.n));
    std::vector<double> data;
    for(const auto& p : fit.points)
        data.push_back(p.mean);
    series.push_back(data);
    for(std::size_t w = 0; w < 4; ++w)
    {
        std::vector<double> ref;
        const double c = fit.degenerate ? 1.0 : fit.laws[w].coefficient;
        for(double x : xs)
            ref.push_back(c * law_value(w, x));
        series.push_back(ref);
    }
    double ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
    for(const auto& s : series)
        for(double y : s)
            if(y > 0.0)
            {
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
    if(!(ymax > 0.0))
        ymin = 1.0, ymax = 10.0;
    if(ymin == ymax)
        ymin /= 2.0, ymax *= 2.0;
    const double lx0 = std::log(xs.front()), lx1 = std::log(xs.back());
    const double ly0 = std::log(ymin), ly1 = std::log(ymax);
    const auto px = [&](double x) { return L + (W - L - R) * (lx1 > lx0 ? (std::log(x) - lx0) / (lx1 - lx0) : 0.5); };
    const auto py = [&](double y) { return H - B - (H - T - B) * (std::log(y) - ly0) / (ly1 - ly0); };

    static const char* colors[] = {"#000000", "#1f77b4", "#2ca02c", "#ff7f0e", "#d62728"};
    std::ostringstream o;
    o << std::fixed << std::setprecision(2);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for(double x : xs)
        o << "<text x=\"" << px(x) << "\" y=\"" << H - B + 18 << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
          << static_cast<std::size_t>(x) << "</text>\n";
    for(double y : {ymin, std::sqrt(ymin * ymax), ymax})
        o << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
          << std::setprecision(0) << y << std::setprecision(2) << "</text>\n";
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">n (log scale)</text>\n";

    for(std::size_t s = 0; s < series.size(); ++s)
    {
        const bool data_series = s == 0;
        o << "<polyline class=\"" << (data_series ? "data" : "reference") << "\" fill=\"none\" stroke=\"" << colors[s]
          << "\" stroke-width=\"" << (data_series ? 2 : 1) << "\"" << (data_series ? "" : " stroke-dasharray=\"5,3\"")
          << " points=\"";
        for(std::size_t k = 0; k < xs.size(); ++k)
            if(series[s][k] > 0.0)
                o << px(xs[k]) << ',' << py(series[s][k]) << ' ';
        o << "\"/>\n";
        if(data_series)
            for(std::size_t k = 0; k < xs.size(); ++k)
                if(series[s][k] > 0.0)
                    o << "<circle cx=\"" << px(xs[k]) << "\" cy=\"" << py(series[s][k]) << "\" r=\"3\" fill=\"black\"/>\n";
        const double ly = T + 10 + 20.0 * static_cast<double>(s);
        o << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly << "\" stroke=\""
          << colors[s] << "\"/>\n";
        o << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << (data_series ? std::string("mean ") + to_string(fit.field) : std::string(law_name(s - 1))) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

struct ReportPaths
{
    std::filesystem::path csv, json, svg;
};

/// Writes results.csv, summary.json and (with a fit) growth.svg into the
/// directory `cfg.out`.
inline ReportPaths emit_report(
    const std::vector<TrialRecord>& records, const std::optional<GrowthFit>& fit, const ExperimentConfig& cfg)
{
    if(records.empty())
        throw Error("no records to report");
    namespace fs = std::filesystem;
    const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    ReportPaths paths{dir / "results.csv", dir / "summary.json", {}};
    const auto open = [](const fs::path& p) {
        std::ofstream f(p, std::ios::binary);
        if(!f)
            throw Error("cannot write '" + p.string() + "'");
        return f;
    };
    {
        auto f = open(paths.csv);
        write_csv(f, records);
        if(!f)
            throw Error("cannot write '" + paths.csv.string() + "'");
    }
    {
        auto f = open(paths.json);
        f << summary_json(records, fit, cfg).dump(2) << '\n';
        if(!f)
            throw Error("cannot write '" + paths.json.string() + "'");
    }
    if(fit)
    {
        paths.svg = dir / "growth.svg";
        auto f = open(paths.svg);
        f << growth_svg(*fit, std::string(to_string(cfg.kind)) + ": mean " + to_string(fit->field) + " vs n");
    }
    return paths;
}

//------------------------------------------------------------------------------
// Single-instance dumps
//------------------------------------------------------------------------------

inline const char* to_string(VertexKind k)
{
    switch(k)
    {
    case VertexKind::Corner: return "corner";
    case VertexKind::FrameHit: return "frame_hit";
    case VertexKind::Circumcenter: return "circumcenter";
    case VertexKind::Crossing: return "crossing";
    }
    return "?";
}

inline nlohmann::json support_json(const Support& s)
{
    if(s.is_frame())
    {
        static const char* sides[] = {"bottom", "right", "top", "left"};
        return {{"frame", sides[static_cast<int>(s.side())]}};
    }
    return {{"bisector", {s.a + 1, s.b + 1}}};
}

/// Overlay with ranks (1-based) in place of site indices.
inline nlohmann::json overlay_json(const OverlayArrangement& A, const nlohmann::json& meta = {})
{
    nlohmann::json j = meta.is_object() ? meta : nlohmann::json::object();
    j["box"] = {A.box.xmin, A.box.ymin, A.box.xmax, A.box.ymax};
    nlohmann::json sites = nlohmann::json::array();
    for(const Point& p : A.sites)
        sites.push_back({p.x, p.y});
    j["sites"] = sites;
    nlohmann::json vs = nlohmann::json::array();
    for(const OverlayVertex& v : A.vertices)
        vs.push_back({{"x", v.p.x}, {"y", v.p.y}, {"kind", to_string(v.key.kind)}});
    j["vertices"] = vs;
    nlohmann::json es = nlohmann::json::array();
    for(const OverlayEdge& e : A.edges)
        es.push_back({{"u", e.u}, {"v", e.v}, {"support", support_json(e.support)}});
    j["edges"] = es;
    nlohmann::json fs = nlohmann::json::array();
    for(const OverlayFace& f : A.faces)
        fs.push_back({{"boundary", f.boundary},
                      {"representative", {f.representative.x, f.representative.y}},
                      {"candidates", f.candidates.ranks}});
    j["faces"] = fs;
    j["complexity"] = {{"V", A.complexity.V}, {"E", A.complexity.E}, {"F", A.complexity.F}};
    j["max_candidate"] = A.max_candidate_size();
    return j;
}

inline nlohmann::json diagram_json(const MWVDiagram& d, const nlohmann::json& meta = {})
{
    nlohmann::json j = meta.is_object() ? meta : nlohmann::json::object();
    nlohmann::json vs = nlohmann::json::array();
    for(const DiagramVertex& v : d.vertices)
        vs.push_back({{"x", v.p.x}, {"y", v.p.y}, {"triple", v.triple}});
    j["vertices"] = vs;
    const auto derived = [](const std::optional<std::size_t>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json("not derived");
    };
    j["counts"] = {{"V", d.counts.V}, {"E", derived(d.counts.E)}, {"F", derived(d.counts.F)}};
    j["provenance"] = d.provenance == Provenance::Oracle ? "oracle" : "fast";
    j["near_degenerate"] = d.near_degenerate;
    return j;
}

} // namespace mwv

#endif // MWV_HARNESS_HPP
