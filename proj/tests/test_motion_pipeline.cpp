#include "mlmap/motion_pipeline.hpp"
#include "mlmap/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace mlmap;

namespace {

MotionRecord make_record(const std::string& id, std::size_t frames, double rate,
                         std::vector<std::string> joints = {"j0", "j1"}) {
    MotionRecord r;
    r.id = id;
    r.joint_names = std::move(joints);
    r.frame_rate_hz = rate;
    r.frames = Tensor(frames, r.joint_names.size());
    for (std::size_t i = 0; i < frames; ++i)
        for (std::size_t j = 0; j < r.joint_names.size(); ++j)
            r.frames(i, j) = static_cast<double>(i) + 0.1 * static_cast<double>(j);
    return r;
}

}  // namespace

TEST_CASE("filter_by_duration boundary") {
    std::vector<MotionRecord> records = {make_record("a", 2999, 100.0), make_record("b", 3000, 100.0)};
    auto kept = filter_by_duration(records, 30.0);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].id == "a");
}

TEST_CASE("filter_by_duration keeps exactly the short subset") {
    std::vector<MotionRecord> records = {
        make_record("a", 100, 100.0),   // 1 s
        make_record("b", 2999, 100.0),  // 29.99 s
        make_record("c", 3000, 100.0),  // 30 s
        make_record("d", 600, 10.0),    // 60 s
        make_record("e", 1, 100.0),     // 0.01 s
    };
    auto kept = filter_by_duration(records, 30.0);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].id == "a");
    CHECK(kept[1].id == "b");
    CHECK(kept[2].id == "e");
}

TEST_CASE("select_joints") {
    MotionRecord r = make_record("a", 3, 100.0, {"x", "y", "z"});
    SUBCASE("identity order") {
        Tensor out = select_joints(r, {"x", "y", "z"});
        CHECK(out.data == r.frames.data);
    }
    SUBCASE("permutation") {
        Tensor out = select_joints(r, {"z", "x"});
        CHECK(out.cols == 2);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(out(i, 0) == r.frames(i, 2));
            CHECK(out(i, 1) == r.frames(i, 0));
        }
    }
    SUBCASE("missing joint is named in the error") {
        try {
            select_joints(r, {"x", "w"});
            FAIL("expected an exception");
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find("w") != std::string::npos);
        }
    }
}

TEST_CASE("downsample offsets: 23 rows") {
    Tensor frames(23, 1);
    for (std::size_t i = 0; i < 23; ++i) frames(i, 0) = static_cast<double>(i);
    auto seqs = downsample_with_offsets(frames, 10);
    REQUIRE(seqs.size() == 10);
    CHECK(seqs[0].rows == 3);
    CHECK(seqs[0](0, 0) == 0.0);
    CHECK(seqs[0](1, 0) == 10.0);
    CHECK(seqs[0](2, 0) == 20.0);
    CHECK(seqs[9].rows == 2);
    CHECK(seqs[9](0, 0) == 9.0);
    CHECK(seqs[9](1, 0) == 19.0);
}

TEST_CASE("downsample offsets partition the input") {
    for (int factor = 1; factor <= 10; ++factor) {
        for (std::size_t len = 1; len <= 200; ++len) {
            Tensor frames(len, 1);
            for (std::size_t i = 0; i < len; ++i) frames(i, 0) = static_cast<double>(i);
            auto seqs = downsample_with_offsets(frames, factor);
            std::vector<int> seen(len, 0);
            for (const Tensor& s : seqs)
                for (std::size_t i = 0; i < s.rows; ++i) ++seen[static_cast<std::size_t>(s(i, 0))];
            for (std::size_t i = 0; i < len; ++i) CHECK(seen[i] == 1);
        }
    }
}

TEST_CASE("standardizer closed forms") {
    SUBCASE("constant joint floors the deviation") {
        Tensor seq = Tensor::full(4, 1, 7.25);
        Standardizer st = Standardizer::fit({&seq});
        CHECK(st.mean[0] == doctest::Approx(7.25));
        CHECK(st.std_dev[0] == Standardizer::kStdFloor);
    }
    SUBCASE("two frames 0 and 2") {
        Tensor seq(2, 1, {0.0, 2.0});
        Standardizer st = Standardizer::fit({&seq});
        CHECK(st.mean[0] == doctest::Approx(1.0));
        CHECK(st.std_dev[0] == doctest::Approx(1.0));
    }
    SUBCASE("empty input is rejected") {
        std::vector<const Tensor*> empty;
        CHECK_THROWS(Standardizer::fit(empty));
    }
}

TEST_CASE("standardizer statistics after apply") {
    Rng rng(31);
    std::vector<Tensor> seqs;
    for (int s = 0; s < 3; ++s) {
        Tensor t(50, 4);
        for (double& v : t.data) v = rng.uniform(-3, 5);
        seqs.push_back(std::move(t));
    }
    Standardizer st = Standardizer::fit(seqs);
    double count = 0;
    std::vector<double> mean(4, 0.0), var(4, 0.0);
    for (const Tensor& t : seqs) {
        Tensor a = st.apply(t);
        count += static_cast<double>(a.rows);
        for (std::size_t i = 0; i < a.rows; ++i)
            for (std::size_t j = 0; j < 4; ++j) mean[j] += a(i, j);
    }
    for (double& m : mean) m /= count;
    for (const Tensor& t : seqs) {
        Tensor a = st.apply(t);
        for (std::size_t i = 0; i < a.rows; ++i)
            for (std::size_t j = 0; j < 4; ++j) var[j] += (a(i, j) - mean[j]) * (a(i, j) - mean[j]);
    }
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(std::abs(mean[j]) < 1e-9);
        CHECK(std::abs(std::sqrt(var[j] / count) - 1.0) < 1e-9);
    }
}

TEST_CASE("standardizer apply and invert") {
    Standardizer st;
    st.mean = {2.0};
    st.std_dev = {4.0};
    Tensor x(1, 1, {10.0});
    CHECK(st.apply(x)(0, 0) == doctest::Approx(2.0));

    Standardizer identity;
    identity.mean = {0.0, 0.0};
    identity.std_dev = {1.0, 1.0};
    Tensor y(2, 2, {1, 2, 3, 4});
    CHECK(identity.apply(y).data == y.data);

    Rng rng(77);
    Standardizer rnd;
    rnd.mean = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    rnd.std_dev = {rng.uniform(0.5, 3), rng.uniform(0.5, 3)};
    Tensor z(5, 2);
    for (double& v : z.data) v = rng.uniform(-10, 10);
    Tensor back = rnd.invert(rnd.apply(z));
    for (std::size_t i = 0; i < z.data.size(); ++i)
        CHECK(std::abs(back.data[i] - z.data[i]) <= 1e-9 * std::max(1.0, std::abs(z.data[i])));

    // the flag column passes through untouched
    Tensor with_flag(2, 3, {1, 2, 1, 3, 4, 0});
    Tensor applied = rnd.apply(with_flag);
    CHECK(applied(0, 2) == 1.0);
    CHECK(applied(1, 2) == 0.0);
}

TEST_CASE("standardizer json round trip") {
    Standardizer st;
    st.mean = {0.123456789012345, -2.5};
    st.std_dev = {1e-8, 3.25};
    Standardizer back = Standardizer::from_json(st.to_json());
    CHECK(back.mean == st.mean);
    CHECK(back.std_dev == st.std_dev);
}

TEST_CASE("pad_and_flag") {
    SUBCASE("no padding when already at the target") {
        Tensor seq = Tensor::full(5, 2, 1.5);
        MotionSequence m = pad_and_flag(seq, 5);
        CHECK(m.active_len == 5);
        for (std::size_t i = 0; i < 5; ++i) CHECK(m.frames(i, 2) == 1.0);
    }
    SUBCASE("padding rows are zero with flag zero") {
        Tensor seq = Tensor::full(3, 2, 2.0);
        MotionSequence m = pad_and_flag(seq, 5);
        CHECK(m.frames.rows == 5);
        for (std::size_t i = 3; i < 5; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(m.frames(i, j) == 0.0);
        for (std::size_t i = 0; i < 3; ++i) CHECK(m.frames(i, 2) == 1.0);
    }
    SUBCASE("empty and overlong sequences are rejected") {
        CHECK_THROWS(pad_and_flag(Tensor::zeros(0, 2), 5));
        CHECK_THROWS(pad_and_flag(Tensor::zeros(6, 2), 5));
    }
}

TEST_CASE("resample_nearest") {
    Tensor frames(5, 1, {0, 1, 2, 3, 4});
    CHECK(resample_nearest(frames, 100.0, 100.0).data == frames.data);

    Tensor half = resample_nearest(frames, 100.0, 50.0);
    CHECK(half.rows == 3);
    CHECK(half(0, 0) == 0.0);
    CHECK(half(1, 0) == 2.0);
    CHECK(half(2, 0) == 4.0);
}
