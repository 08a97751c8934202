#include "cosime/hdc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cosime/error.hpp"
#include "cosime/rng.hpp"

namespace cosime::hdc {

// ---- similarity oracles ----------------------------------------------------

Similarity exact_cosine(const BinaryVector& a, const BinaryVector& b) {
    const std::size_t dot = a.and_count(b);
    const std::size_t na = a.popcount();
    const std::size_t nb = b.popcount();
    if (na == 0 || nb == 0) return {0.0, true};
    return {static_cast<double>(dot) / std::sqrt(static_cast<double>(na) * static_cast<double>(nb)),
            false};
}

Similarity squared_cosine(const BinaryVector& a, const BinaryVector& b) {
    const std::size_t dot = a.and_count(b);
    const std::size_t na = a.popcount();
    const std::size_t nb = b.popcount();
    if (na == 0 || nb == 0) return {0.0, true};
    const double d = static_cast<double>(dot);
    return {d * d / (static_cast<double>(na) * static_cast<double>(nb)), false};
}

std::size_t hamming(const BinaryVector& a, const BinaryVector& b) { return a.xor_count(b); }

// ---- data ------------------------------------------------------------------

Dataset parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (columns == 0) {
            columns = cells.size();
            if (columns < 2) throw ParseError("need at least one feature and a label column", line_no);
            continue;  // header
        }
        if (cells.size() != columns) {
            throw ParseError("expected " + std::to_string(columns) + " columns, got " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        std::vector<double> row(columns - 1);
        for (std::size_t c = 0; c + 1 < columns; ++c) {
            try {
                std::size_t used = 0;
                row[c] = std::stod(cells[c], &used);
                if (used != cells[c].size()) throw std::invalid_argument(cells[c]);
            } catch (const std::exception&) {
                throw ParseError("column " + std::to_string(c + 1) + " is not a number: '" +
                                     cells[c] + "'",
                                 line_no);
            }
        }
        int label = 0;
        try {
            std::size_t used = 0;
            label = std::stoi(cells.back(), &used);
            if (used != cells.back().size() || label < 0) throw std::invalid_argument(cells.back());
        } catch (const std::exception&) {
            throw ParseError("label must be a non-negative integer: '" + cells.back() + "'", line_no);
        }
        rows.push_back(std::move(row));
        labels.push_back(label);
    }
    if (rows.empty()) throw InputError("dataset has no samples");

    Dataset d;
    d.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns - 1));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c + 1 < columns; ++c)
            d.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    d.labels = std::move(labels);
    d.num_classes = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
    return d;
}

Dataset load_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open dataset: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_csv(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.detail(), e.line());
    }
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write dataset: " + path);
    for (std::size_t c = 0; c < data.n_features(); ++c) f << 'f' << c << ',';
    f << "label\n";
    f << std::setprecision(9);
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (std::size_t c = 0; c < data.n_features(); ++c)
            f << data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) << ',';
        f << data.labels[r] << '\n';
    }
}

namespace {

struct SurrogateShape {
    std::size_t n_features;
    int classes;
    std::size_t train;
    std::size_t test;
    std::vector<double> class_weight;  // relative priors
};

Dataset sample_clusters(const SurrogateShape& shape, std::size_t count,
                        const Eigen::MatrixXd& centers, const std::vector<double>& spreads,
                        const Eigen::MatrixXd& loading, const Eigen::VectorXd& offset,
                        double feature_noise, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    std::discrete_distribution<int> pick(shape.class_weight.begin(), shape.class_weight.end());
    const Eigen::Index latent = centers.cols();

    Dataset d;
    d.num_classes = shape.classes;
    d.features.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(shape.n_features));
    d.labels.resize(count);
    Eigen::VectorXd z(latent);
    for (std::size_t s = 0; s < count; ++s) {
        // Every class appears at least once in each split.
        const int k = s < static_cast<std::size_t>(shape.classes) ? static_cast<int>(s) : pick(rng);
        for (Eigen::Index j = 0; j < latent; ++j) z(j) = centers(k, j) + spreads[k] * n01(rng);
        const Eigen::VectorXd h = loading * z + offset;
        for (Eigen::Index f = 0; f < h.size(); ++f)
            d.features(static_cast<Eigen::Index>(s), f) = std::tanh(h(f)) + feature_noise * n01(rng);
        d.labels[s] = k;
    }
    return d;
}

// FNV-1a; std::hash is not stable across standard libraries.
std::uint64_t name_tag(const std::string& name) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

DatasetSplit make_surrogate(const std::string& name, std::uint64_t seed) {
    SurrogateShape shape;
    if (name == "isolet") {
        shape = {617, 26, 6238, 1559, std::vector<double>(26, 1.0)};
    } else if (name == "ucihar") {
        std::vector<double> w(12, 1.0);
        for (std::size_t k = 6; k < 12; ++k) w[k] = 0.08;
        shape = {561, 12, 6213, 1554, w};
    } else if (name == "face") {
        shape = {608, 2, 20000, 2494, {0.75, 0.25}};
    } else {
        throw LookupError("unknown surrogate dataset '" + name + "' (isolet, ucihar, face)");
    }

    Rng rng(derive_seed(seed, name_tag(name)));
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    constexpr Eigen::Index latent = 24;

    Eigen::MatrixXd centers(shape.classes, latent);
    for (Eigen::Index k = 0; k < centers.rows(); ++k)
        for (Eigen::Index j = 0; j < latent; ++j) centers(k, j) = n01(rng);
    std::vector<double> spreads(static_cast<std::size_t>(shape.classes));
    for (auto& s : spreads) s = 0.8 + 0.8 * u01(rng);

    Eigen::MatrixXd loading(static_cast<Eigen::Index>(shape.n_features), latent);
    for (Eigen::Index f = 0; f < loading.rows(); ++f)
        for (Eigen::Index j = 0; j < latent; ++j)
            loading(f, j) = n01(rng) / std::sqrt(static_cast<double>(latent));
    Eigen::VectorXd offset(static_cast<Eigen::Index>(shape.n_features));
    for (Eigen::Index f = 0; f < offset.size(); ++f) offset(f) = 0.8 * n01(rng);

    DatasetSplit split;
    split.name = name;
    split.train = sample_clusters(shape, shape.train, centers, spreads, loading, offset, 0.3, rng);
    split.test = sample_clusters(shape, shape.test, centers, spreads, loading, offset, 0.3, rng);
    return split;
}

DatasetSplit make_separable(std::size_t n_features, int classes, std::size_t per_class,
                            std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    Eigen::MatrixXd centers(classes, static_cast<Eigen::Index>(n_features));
    for (Eigen::Index k = 0; k < centers.rows(); ++k)
        for (Eigen::Index f = 0; f < centers.cols(); ++f) centers(k, f) = 3.0 * n01(rng);

    auto draw = [&](std::size_t count) {
        Dataset d;
        d.num_classes = classes;
        d.features.resize(static_cast<Eigen::Index>(count * static_cast<std::size_t>(classes)),
                          static_cast<Eigen::Index>(n_features));
        for (int k = 0; k < classes; ++k) {
            for (std::size_t s = 0; s < count; ++s) {
                const auto row = static_cast<Eigen::Index>(static_cast<std::size_t>(k) * count + s);
                for (Eigen::Index f = 0; f < centers.cols(); ++f)
                    d.features(row, f) = centers(k, f) + 0.1 * n01(rng);
                d.labels.push_back(k);
            }
        }
        return d;
    };
    DatasetSplit split;
    split.name = "separable";
    split.train = draw(per_class);
    split.test = draw(per_class);
    return split;
}

// ---- encoding --------------------------------------------------------------

Encoder::Encoder(EncoderConfig cfg, std::size_t n_features)
    : cfg_(cfg), n_features_(n_features), mean_(n_features, 0.0), std_(n_features, 1.0) {
    if (cfg_.dim < 1) throw DomainError("encoder dim must be >= 1");
    if (n_features_ < 1) throw DomainError("encoder needs at least one feature");
    if (cfg_.quantization == 1 || cfg_.quantization < 0)
        throw DomainError("encoder quantization must be 0 or >= 2 levels");
    Rng rng(cfg_.projection_seed);
    projection_.resize(static_cast<Eigen::Index>(cfg_.dim), static_cast<Eigen::Index>(n_features_));
    std::uint64_t bits = 0;
    int left = 0;
    for (Eigen::Index c = 0; c < projection_.cols(); ++c) {
        for (Eigen::Index r = 0; r < projection_.rows(); ++r) {
            if (left == 0) {
                bits = rng();
                left = 64;
            }
            projection_(r, c) = (bits & 1ULL) ? 1.0f : -1.0f;
            bits >>= 1;
            --left;
        }
    }
}

void Encoder::fit(const Eigen::MatrixXd& train_features) {
    if (static_cast<std::size_t>(train_features.cols()) != n_features_)
        throw ShapeError("encoder fit: feature count mismatch");
    const auto n = static_cast<double>(train_features.rows());
    for (std::size_t c = 0; c < n_features_; ++c) {
        const auto col = train_features.col(static_cast<Eigen::Index>(c));
        const double m = col.mean();
        const double var = (col.array() - m).square().sum() / n;
        mean_[c] = m;
        std_[c] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
}

void Encoder::set_statistics(std::vector<double> mean, std::vector<double> stddev) {
    if (mean.size() != n_features_ || stddev.size() != n_features_)
        throw ShapeError("encoder statistics length mismatch");
    mean_ = std::move(mean);
    std_ = std::move(stddev);
}

Eigen::MatrixXf Encoder::standardize(const Eigen::MatrixXd& features) const {
    if (static_cast<std::size_t>(features.cols()) != n_features_) {
        throw ShapeError("expected " + std::to_string(n_features_) + " features, got " +
                         std::to_string(features.cols()));
    }
    // features x samples, the layout the projection multiplies.
    Eigen::MatrixXf out(features.cols(), features.rows());
    const int levels = cfg_.quantization;
    const double step = levels >= 2 ? 6.0 / static_cast<double>(levels) : 0.0;
    for (Eigen::Index s = 0; s < features.rows(); ++s) {
        for (Eigen::Index c = 0; c < features.cols(); ++c) {
            double z = (features(s, c) - mean_[static_cast<std::size_t>(c)]) /
                       std_[static_cast<std::size_t>(c)];
            if (levels >= 2) {
                // Uniform levels over [-3, 3], reconstructed at bin centers.
                const double idx = std::clamp(std::floor((z + 3.0) / step), 0.0,
                                              static_cast<double>(levels - 1));
                z = -3.0 + (idx + 0.5) * step;
            }
            out(c, s) = static_cast<float>(z);
        }
    }
    return out;
}

std::vector<BinaryVector> Encoder::encode_all(const Eigen::MatrixXd& features) const {
    const Eigen::MatrixXf proj = projection_ * standardize(features);
    std::vector<BinaryVector> out;
    out.reserve(static_cast<std::size_t>(proj.cols()));
    for (Eigen::Index s = 0; s < proj.cols(); ++s) {
        BinaryVector v(cfg_.dim);
        for (Eigen::Index d = 0; d < proj.rows(); ++d)
            if (proj(d, s) >= 0.0f) v.set(static_cast<std::size_t>(d), true);
        out.push_back(std::move(v));
    }
    return out;
}

BinaryVector Encoder::encode(const std::vector<double>& features) const {
    if (features.size() != n_features_) {
        throw ShapeError("expected " + std::to_string(n_features_) + " features, got " +
                         std::to_string(features.size()));
    }
    Eigen::MatrixXd row(1, static_cast<Eigen::Index>(features.size()));
    for (std::size_t c = 0; c < features.size(); ++c) row(0, static_cast<Eigen::Index>(c)) = features[c];
    return encode_all(row).front();
}

// ---- model -----------------------------------------------------------------

std::vector<BinaryVector> majority_bundle(const std::vector<BinaryVector>& encoded,
                                          const std::vector<int>& labels, int num_classes) {
    if (encoded.size() != labels.size()) throw ShapeError("encoded samples and labels differ in count");
    if (encoded.empty()) throw InputError("no training samples");
    const std::size_t dim = encoded.front().size();
    std::vector<std::vector<std::uint32_t>> ones(static_cast<std::size_t>(num_classes),
                                                 std::vector<std::uint32_t>(dim, 0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
    for (std::size_t s = 0; s < encoded.size(); ++s) {
        const auto k = static_cast<std::size_t>(labels[s]);
        if (labels[s] < 0 || k >= counts.size()) throw InputError("label out of range");
        ++counts[k];
        for (std::size_t d = 0; d < dim; ++d)
            if (encoded[s].get(d)) ++ones[k][d];
    }
    std::string empty;
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] == 0) empty += (empty.empty() ? "" : ", ") + std::to_string(k);
    if (!empty.empty()) throw InputError("classes without training samples: " + empty);

    std::vector<BinaryVector> classes;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        BinaryVector v(dim);
        for (std::size_t d = 0; d < dim; ++d)
            if (2 * static_cast<std::size_t>(ones[k][d]) >= counts[k]) v.set(d, true);
        classes.push_back(std::move(v));
    }
    return classes;
}

HdcModel train_single_pass(const Dataset& train, const EncoderConfig& cfg) {
    if (train.num_classes < 2) throw InputError("need at least two classes");
    HdcModel model;
    model.encoder = Encoder(cfg, train.n_features());
    model.encoder.fit(train.features);
    const auto encoded = model.encoder.encode_all(train.features);
    model.classes = majority_bundle(encoded, train.labels, train.num_classes);
    model.class_counts.assign(static_cast<std::size_t>(train.num_classes), 0);
    for (int l : train.labels) ++model.class_counts[static_cast<std::size_t>(l)];
    return model;
}

namespace {
constexpr const char* kModelFormat = "cosime-hdc-model";
constexpr int kModelVersion = 1;
}  // namespace

std::string model_to_json(const HdcModel& model) {
    nlohmann::json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    const auto& e = model.encoder;
    j["encoder"] = {{"projection_seed", e.config().projection_seed},
                    {"dim", e.config().dim},
                    {"quantization", e.config().quantization},
                    {"n_features", e.n_features()},
                    {"mean", e.mean()},
                    {"stddev", e.stddev()}};
    std::vector<std::string> classes;
    for (const auto& c : model.classes) classes.push_back(c.to_string());
    j["classes"] = classes;
    j["class_counts"] = model.class_counts;
    return j.dump(1);
}

HdcModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("model file is not valid JSON: ") + e.what());
    }
    if (j.value("format", "") != kModelFormat) throw InputError("not an HDC model file");
    if (j.value("version", 0) != kModelVersion)
        throw InputError("unsupported model version " + std::to_string(j.value("version", 0)));
    try {
        const auto& je = j.at("encoder");
        EncoderConfig cfg;
        cfg.projection_seed = je.at("projection_seed").get<std::uint64_t>();
        cfg.dim = je.at("dim").get<std::size_t>();
        cfg.quantization = je.at("quantization").get<int>();
        HdcModel m;
        m.encoder = Encoder(cfg, je.at("n_features").get<std::size_t>());
        m.encoder.set_statistics(je.at("mean").get<std::vector<double>>(),
                                 je.at("stddev").get<std::vector<double>>());
        for (const auto& s : j.at("classes")) {
            m.classes.push_back(BinaryVector::from_string(s.get<std::string>()));
            if (m.classes.back().size() != cfg.dim) throw ShapeError("class vector length != dim");
        }
        m.class_counts = j.at("class_counts").get<std::vector<std::size_t>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed model file: ") + e.what());
    }
}

// ---- backends --------------------------------------------------------------

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::oracle_cosine: return "oracle_cosine";
        case Backend::oracle_hamming: return "oracle_hamming";
        case Backend::simulated_am: return "simulated_am";
    }
    return "?";
}

Backend backend_from_name(const std::string& name) {
    if (name == "oracle_cosine" || name == "cosine") return Backend::oracle_cosine;
    if (name == "oracle_hamming" || name == "hamming") return Backend::oracle_hamming;
    if (name == "simulated_am" || name == "am") return Backend::simulated_am;
    throw LookupError("unknown backend '" + name + "'");
}

std::size_t search_cosine(const BinaryVector& query, const std::vector<BinaryVector>& classes) {
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const double v = squared_cosine(query, classes[k]).value;
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    return best;
}

std::size_t search_hamming(const BinaryVector& query, const std::vector<BinaryVector>& classes) {
    std::size_t best = 0;
    std::size_t best_d = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const std::size_t d = hamming(query, classes[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

SimulatedAm::SimulatedAm(const std::vector<BinaryVector>& classes, AmSettings settings)
    : settings_(std::move(settings)) {
    if (classes.size() < 2) throw ShapeError("associative memory needs at least two classes");
    array::ArrayGeometry g;
    g.rows = classes.size();
    g.dim = classes.front().size();
    g.scale_factor = settings_.iy_target > 0.0
                         ? array::scale_for_target(classes, settings_.cell, settings_.iy_target)
                         : 1.0;
    arrays_ = array::program(classes, g, settings_.cell, settings_.spec);
}

std::vector<double> SimulatedAm::similarity_currents(const BinaryVector& query) const {
    const array::RowCurrents rc = array::row_currents(arrays_, query);
    std::vector<double> iz(rc.ix.size(), 0.0);
    for (std::size_t r = 0; r < iz.size(); ++r)
        if (rc.iy[r] > 0.0) iz[r] = translinear::squared_ratio(rc.ix[r], rc.iy[r], settings_.translinear).iz;
    return iz;
}

AmDecision SimulatedAm::search(const BinaryVector& query) const {
    const std::vector<double> iz = similarity_currents(query);
    AmDecision d;
    if (*std::max_element(iz.begin(), iz.end()) <= 0.0) {
        d.converged = true;  // nothing conducts; lowest index wins the tie
        return d;
    }
    const wta::Resolution r = wta::resolve_winner(iz, settings_.wta);
    d.winner = r.winner;
    d.converged = r.solution.converged;
    d.resolvable = r.resolvable;
    return d;
}

Inference infer_encoded(const BinaryVector& query, const HdcModel& model, Backend backend,
                        const SimulatedAm* am) {
    Inference out;
    switch (backend) {
        case Backend::oracle_cosine:
            out.label = search_cosine(query, model.classes);
            break;
        case Backend::oracle_hamming:
            out.label = search_hamming(query, model.classes);
            break;
        case Backend::simulated_am: {
            if (!am) throw InputError("simulated_am backend requires a programmed memory");
            const AmDecision d = am->search(query);
            out.label = d.winner;
            out.am_failure = !d.converged;
            break;
        }
    }
    return out;
}

Inference infer(const std::vector<double>& features, const HdcModel& model, Backend backend,
                const SimulatedAm* am) {
    return infer_encoded(model.encoder.encode(features), model, backend, am);
}

double top2_gap(const BinaryVector& query, const std::vector<BinaryVector>& classes) {
    double best = 0.0;
    double second = 0.0;
    for (const auto& c : classes) {
        const double v = squared_cosine(query, c).value;
        if (v > best) {
            second = best;
            best = v;
        } else if (v > second) {
            second = v;
        }
    }
    return best > 0.0 ? (best - second) / best : 0.0;
}

std::vector<AccuracyRow> evaluate(const DatasetSplit& split, const std::vector<std::size_t>& dims,
                                  const std::vector<Backend>& backends,
                                  const EvalSettings& settings) {
    std::vector<AccuracyRow> rows;
    for (std::size_t dim : dims) {
        EncoderConfig cfg;
        cfg.projection_seed = settings.projection_seed;
        cfg.dim = dim;
        cfg.quantization = settings.quantization;
        const HdcModel model = train_single_pass(split.train, cfg);
        const auto queries = model.encoder.encode_all(split.test.features);

        std::unique_ptr<SimulatedAm> am;
        for (Backend b : backends) {
            if (b == Backend::simulated_am && !am)
                am = std::make_unique<SimulatedAm>(model.classes, settings.am);
            AccuracyRow row;
            row.dim = dim;
            row.metric = backend_name(b);
            row.queries = queries.size();
            std::size_t hits = 0;
            for (std::size_t q = 0; q < queries.size(); ++q) {
                const Inference inf = infer_encoded(queries[q], model, b, am.get());
                if (inf.am_failure) {
                    ++row.am_failures;
                    continue;
                }
                if (static_cast<int>(inf.label) == split.test.labels[q]) ++hits;
            }
            row.accuracy = static_cast<double>(hits) / static_cast<double>(queries.size());
            rows.push_back(row);
        }
    }
    return rows;
}

// ---- error injection ------------------------------------------------------

const char* injection_name(InjectionMode m) {
    switch (m) {
        case InjectionMode::uniform: return "uniform";
        case InjectionMode::runner_up: return "runner_up";
        case InjectionMode::noise_matched: return "noise_matched";
    }
    return "?";
}

InjectionMode injection_from_name(const std::string& name) {
    if (name == "uniform") return InjectionMode::uniform;
    if (name == "runner_up") return InjectionMode::runner_up;
    if (name == "noise_matched") return InjectionMode::noise_matched;
    throw LookupError("unknown injection mode '" + name + "'");
}

namespace {

std::size_t argmax_row(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

std::size_t runner_up(const std::vector<double>& v, std::size_t best) {
    std::size_t second = best == 0 ? 1 : 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (i != best && v[i] > v[second]) second = i;
    return second;
}

}  // namespace

InjectionResult inject_am_errors(const std::vector<std::vector<double>>& scores, double rate,
                                 InjectionMode mode, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("error rate must be in [0, 1]");
    InjectionResult out;
    const std::size_t n = scores.size();
    out.predictions.resize(n);
    std::vector<std::size_t> clean(n);
    for (std::size_t q = 0; q < n; ++q) {
        if (scores[q].size() < 2) throw ShapeError("need at least two classes per query");
        clean[q] = argmax_row(scores[q]);
    }
    Rng rng(seed);

    if (mode == InjectionMode::uniform || mode == InjectionMode::runner_up) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::size_t flips = 0;
        for (std::size_t q = 0; q < n; ++q) {
            const double draw = u01(rng);
            std::uniform_int_distribution<std::size_t> other(0, scores[q].size() - 2);
            const std::size_t pick = other(rng);
            out.predictions[q] = clean[q];
            if (draw < rate) {
                out.predictions[q] = mode == InjectionMode::runner_up
                                         ? runner_up(scores[q], clean[q])
                                         : (pick >= clean[q] ? pick + 1 : pick);
                ++flips;
            }
        }
        out.flip_rate = n ? static_cast<double>(flips) / static_cast<double>(n) : 0.0;
        return out;
    }

    // Fixed standard-normal draws; only their scale is searched, so the flip
    // fraction grows (statistically) with sigma and bisection applies.
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<std::vector<double>> z(n);
    for (std::size_t q = 0; q < n; ++q) {
        z[q].resize(scores[q].size());
        for (double& x : z[q]) x = n01(rng);
    }
    auto decide = [&](double sigma, std::vector<std::size_t>& pred) {
        std::size_t flips = 0;
        std::vector<double> noisy;
        for (std::size_t q = 0; q < n; ++q) {
            noisy.resize(scores[q].size());
            for (std::size_t k = 0; k < noisy.size(); ++k)
                noisy[k] = scores[q][k] * std::exp(sigma * z[q][k]);
            pred[q] = argmax_row(noisy);
            if (pred[q] != clean[q]) ++flips;
        }
        return n ? static_cast<double>(flips) / static_cast<double>(n) : 0.0;
    };
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> pred(n);
    while (decide(hi, pred) < rate && hi < 1e3) hi *= 2.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (decide(mid, pred) < rate) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.noise_sigma = hi;
    out.flip_rate = decide(hi, out.predictions);
    return out;
}

}  // namespace cosime::hdc
