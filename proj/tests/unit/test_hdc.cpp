#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "cosime/error.hpp"
#include "cosime/hdc.hpp"

using namespace cosime;
using namespace cosime::hdc;

namespace {

BinaryVector bv(const char* s) { return BinaryVector::from_string(s); }

Dataset tiny(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels, int k) {
    Dataset d;
    d.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            d.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    d.labels = labels;
    d.num_classes = k;
    return d;
}

}  // namespace

TEST_CASE("cosine similarity") {
    CHECK(exact_cosine(bv("1101"), bv("1101")).value == doctest::Approx(1.0));
    CHECK(exact_cosine(bv("1100"), bv("0011")).value == 0.0);
    CHECK(squared_cosine(bv("1100"), bv("1010")).value == doctest::Approx(0.25));
    const auto z = exact_cosine(bv("0000"), bv("1010"));
    CHECK(z.zero_vector);
    CHECK(z.value == 0.0);
    CHECK_THROWS_AS(exact_cosine(bv("10"), bv("101")), ShapeError);
}

TEST_CASE("hamming distance") {
    CHECK(hamming(bv("1011"), bv("1011")) == 0);
    CHECK(hamming(bv("1011"), ~bv("1011")) == 4);
    CHECK(hamming(bv("1100"), bv("1010")) == 2);
    CHECK_THROWS_AS(hamming(bv("10"), bv("101")), ShapeError);
}

TEST_CASE("cosine and hamming agree when stored norms are equal") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        std::vector<BinaryVector> stored;
        for (int k = 0; k < 6; ++k) {
            std::vector<int> bits(64, 0);
            for (int i = 0; i < 32; ++i) bits[static_cast<std::size_t>(i)] = 1;
            std::shuffle(bits.begin(), bits.end(), rng);
            stored.push_back(BinaryVector::from_bits(bits));
        }
        std::vector<int> qbits(64);
        for (auto& b : qbits) b = static_cast<int>(rng() & 1);
        const auto q = BinaryVector::from_bits(qbits);
        const std::size_t c = search_cosine(q, stored);
        const std::size_t h = search_hamming(q, stored);
        CHECK(squared_cosine(q, stored[c]).value == doctest::Approx(squared_cosine(q, stored[h]).value));
    }
}

TEST_CASE("encoder determinism and sign symmetry") {
    EncoderConfig cfg;
    cfg.dim = 512;
    Encoder e(cfg, 5);
    e.set_statistics(std::vector<double>(5, 0.0), std::vector<double>(5, 1.0));
    const std::vector<double> x{0.3, -1.2, 2.0, 0.7, -0.1};
    CHECK(e.encode(x) == e.encode(x));
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(e.encode(neg) == ~e.encode(x));
    CHECK_THROWS_AS(e.encode({1.0, 2.0}), ShapeError);
}

TEST_CASE("encoding preserves locality") {
    EncoderConfig cfg;
    cfg.dim = 1024;
    const std::size_t f = 32;
    Encoder e(cfg, f);
    e.set_statistics(std::vector<double>(f, 0.0), std::vector<double>(f, 1.0));
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n01(0.0, 1.0);
    double previous = -1.0;
    for (double eps : {0.01, 0.1, 0.3, 1.0}) {
        double total = 0.0;
        for (int t = 0; t < 50; ++t) {
            std::vector<double> x(f), y(f);
            for (std::size_t i = 0; i < f; ++i) {
                x[i] = n01(rng);
                y[i] = x[i] + eps * n01(rng);
            }
            total += static_cast<double>(hamming(e.encode(x), e.encode(y)));
        }
        CHECK(total > previous);
        previous = total;
    }
}

TEST_CASE("quantized encoding uses the configured levels") {
    EncoderConfig cfg;
    cfg.dim = 256;
    cfg.quantization = 4;
    Encoder e(cfg, 3);
    e.set_statistics(std::vector<double>(3, 0.0), std::vector<double>(3, 1.0));
    // Inputs in the same level encode identically.
    CHECK(e.encode({0.1, 0.2, -2.0}) == e.encode({0.5, 1.4, -2.9}));
    cfg.quantization = 1;
    CHECK_THROWS_AS(Encoder(cfg, 3), DomainError);
}

TEST_CASE("majority bundling") {
    CHECK(majority_bundle({bv("1010"), bv("0111")}, {0, 1}, 2) ==
          std::vector<BinaryVector>{bv("1010"), bv("0111")});
    CHECK(majority_bundle({bv("1010"), bv("1010"), bv("1010")}, {0, 0, 0}, 1).front() == bv("1010"));
    // Per bit: 2 of 3, 1 of 3, 3 of 3, 0 of 3, 2 of 3.
    CHECK(majority_bundle({bv("11100"), bv("10101"), bv("00101")}, {0, 0, 0}, 1).front() ==
          bv("10101"));
    // Even split ties go to 1.
    CHECK(majority_bundle({bv("10"), bv("01")}, {0, 0}, 1).front() == bv("11"));
}

TEST_CASE("a class without samples is an error naming it") {
    try {
        majority_bundle({bv("10"), bv("01")}, {0, 2}, 4);
        FAIL("expected an error");
    } catch (const InputError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1, 3") != std::string::npos);
    }
}

TEST_CASE("one sample per class trains to its encoding") {
    const Dataset d = tiny({{1.0, 0.0, 3.0}, {-1.0, 2.0, 0.5}, {0.2, -1.0, 1.0}}, {0, 1, 2}, 3);
    EncoderConfig cfg;
    cfg.dim = 256;
    const HdcModel m = train_single_pass(d, cfg);
    const auto enc = m.encoder.encode_all(d.features);
    for (std::size_t k = 0; k < 3; ++k) CHECK(m.classes[k] == enc[k]);
}

TEST_CASE("class vectors classify as themselves on every backend") {
    const DatasetSplit s = make_separable(20, 4, 10, 3);
    EncoderConfig cfg;
    cfg.dim = 256;
    const HdcModel m = train_single_pass(s.train, cfg);
    const SimulatedAm am(m.classes, AmSettings{});
    for (std::size_t k = 0; k < m.classes.size(); ++k) {
        for (Backend b : {Backend::oracle_cosine, Backend::oracle_hamming, Backend::simulated_am})
            CHECK(infer_encoded(m.classes[k], m, b, &am).label == k);
    }
}

TEST_CASE("separable data is classified perfectly") {
    const DatasetSplit s = make_separable(40, 5, 20, 11);
    EvalSettings es;
    es.am.iy_target = 600e-9;
    const auto rows = evaluate(s, {256}, {Backend::oracle_cosine, Backend::oracle_hamming,
                                          Backend::simulated_am}, es);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.accuracy > 0.99);
        CHECK(r.am_failures == 0);
    }
}

TEST_CASE("model files round trip") {
    const DatasetSplit s = make_separable(12, 3, 8, 2);
    EncoderConfig cfg;
    cfg.dim = 128;
    cfg.projection_seed = 77;
    const HdcModel m = train_single_pass(s.train, cfg);
    const HdcModel back = model_from_json(model_to_json(m));
    CHECK(back.classes == m.classes);
    CHECK(back.class_counts == m.class_counts);
    CHECK(back.encoder.encode_all(s.test.features) == m.encoder.encode_all(s.test.features));

    CHECK_THROWS_AS(model_from_json("{"), InputError);
    CHECK_THROWS_AS(model_from_json(R"({"format":"other","version":1})"), InputError);
    CHECK_THROWS_AS(model_from_json(R"({"format":"cosime-hdc-model","version":99})"), InputError);
}

TEST_CASE("dataset CSV parsing") {
    const Dataset d = parse_csv("a,b,label\n1,2,0\n3,4.5,1\n");
    CHECK(d.size() == 2);
    CHECK(d.n_features() == 2);
    CHECK(d.num_classes == 2);
    CHECK(d.features(1, 1) == 4.5);
    try {
        parse_csv("a,b,label\n1,2,0\n3,x,1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    try {
        parse_csv("a,b,label\n1,2,0\n3,1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_csv("a,b,label\n1,2,-1\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("a,b,label\n"), InputError);
}

TEST_CASE("dataset CSV round trip") {
    const DatasetSplit s = make_separable(6, 3, 4, 5);
    const std::string path = "hdc_roundtrip_test.csv";
    write_csv(s.train, path);
    const Dataset back = load_csv(path);
    std::remove(path.c_str());
    CHECK(back.labels == s.train.labels);
    CHECK((back.features - s.train.features).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("surrogate shapes") {
    const DatasetSplit iso = make_surrogate("isolet", 1);
    CHECK(iso.train.n_features() == 617);
    CHECK(iso.train.size() == 6238);
    CHECK(iso.test.size() == 1559);
    CHECK(iso.train.num_classes == 26);
    const DatasetSplit har = make_surrogate("ucihar", 1);
    CHECK(har.train.n_features() == 561);
    CHECK(har.train.num_classes == 12);
    const DatasetSplit face = make_surrogate("face", 1);
    CHECK(face.train.n_features() == 608);
    CHECK(face.train.num_classes == 2);
    std::size_t ones = 0;
    for (int l : face.train.labels) ones += l == 1;
    CHECK(ones < face.train.size() / 2);
    CHECK_THROWS_AS(make_surrogate("mnist", 1), LookupError);
    const DatasetSplit again = make_surrogate("isolet", 1);
    CHECK(again.train.labels == iso.train.labels);
    CHECK(again.train.features == iso.train.features);
}

TEST_CASE("top-2 gap") {
    const std::vector<BinaryVector> classes{bv("1100"), bv("1110"), bv("0001")};
    // cos^2 with 1100: 1, 4/6, 0
    CHECK(top2_gap(bv("1100"), classes) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("error injection modes") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> scores(4000, std::vector<double>(5));
    for (auto& row : scores)
        for (double& x : row) x = u(rng);

    const auto clean = inject_am_errors(scores, 0.0, InjectionMode::uniform, 3);
    CHECK(clean.flip_rate == 0.0);
    for (std::size_t q = 0; q < scores.size(); ++q)
        CHECK(clean.predictions[q] ==
              static_cast<std::size_t>(std::max_element(scores[q].begin(), scores[q].end()) -
                                       scores[q].begin()));

    for (InjectionMode mode : {InjectionMode::uniform, InjectionMode::runner_up,
                               InjectionMode::noise_matched}) {
        const auto r = inject_am_errors(scores, 0.1, mode, 3);
        CHECK(r.flip_rate == doctest::Approx(0.1).epsilon(0.15));
    }

    const auto ru = inject_am_errors(scores, 1.0, InjectionMode::runner_up, 3);
    for (std::size_t q = 0; q < scores.size(); ++q) {
        auto sorted = scores[q];
        std::sort(sorted.rbegin(), sorted.rend());
        CHECK(scores[q][ru.predictions[q]] == sorted[1]);
    }
    CHECK_THROWS_AS(inject_am_errors(scores, 1.5, InjectionMode::uniform, 1), DomainError);
    CHECK_THROWS_AS(injection_from_name("bits"), LookupError);
    CHECK_THROWS_AS(backend_from_name("euclid"), LookupError);
    CHECK(backend_from_name(backend_name(Backend::simulated_am)) == Backend::simulated_am);
}
