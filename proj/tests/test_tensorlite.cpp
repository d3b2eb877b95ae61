#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dmtg/nn.hpp"
#include "dmtg/rng.hpp"
#include "dmtg/tensor.hpp"

using namespace dmtg;

namespace {

/// Conv -> GroupNorm -> SiLU -> Conv stack used for the composed-gradient check.
class SmallStack : public nn::Module {
  public:
    SmallStack() : c1_(3, 8, 3), gn_(4, 8), c2_(8, 2, 3) {}

    TensorBuf forward(const TensorBuf& x) override {
        return c2_.forward(act_.forward(gn_.forward(c1_.forward(x))));
    }
    TensorBuf backward(const TensorBuf& g) override {
        return c1_.backward(gn_.backward(act_.backward(c2_.backward(g))));
    }
    std::vector<TensorBuf*> params() override {
        auto out = c1_.params();
        for (auto* p : gn_.params()) out.push_back(p);
        for (auto* p : c2_.params()) out.push_back(p);
        return out;
    }
    std::vector<TensorBuf*> grads() override {
        auto out = c1_.grads();
        for (auto* g : gn_.grads()) out.push_back(g);
        for (auto* g : c2_.grads()) out.push_back(g);
        return out;
    }
    const char* name() const override { return "SmallStack"; }

  private:
    nn::Conv1D c1_;
    nn::GroupNorm gn_;
    nn::SiLU act_;
    nn::Conv1D c2_;
};

}  // namespace

TEST_CASE("dense identity map") {
    nn::Dense d(3, 3);
    d.weight().fill(0.0);
    for (int i = 0; i < 3; ++i) d.weight().at2(i, i) = 1.0;
    d.bias().fill(0.0);
    TensorBuf x({2, 3});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * static_cast<double>(i) - 1.0;
    const TensorBuf y = d.forward(x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("conv1d delta kernel is identity") {
    nn::Conv1D c(1, 1, 3);
    c.params()[0]->fill(0.0);
    // kernel [0, 1, 0] with same-padding
    c.params()[0]->data[1] = 1.0;
    c.params()[1]->fill(0.0);
    TensorBuf x({1, 1, 8});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.7 * static_cast<double>(i));
    const TensorBuf y = c.forward(x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == Catch::Approx(x[i]).margin(1e-15));
}

TEST_CASE("silu basics") {
    CHECK(nn::silu(0.0) == 0.0);
    CHECK(nn::silu(10.0) == Catch::Approx(10.0).epsilon(1e-3));
    CHECK(nn::silu_grad(0.0) == Catch::Approx(0.5));
}

TEST_CASE("per-layer gradient checks") {
    {
        nn::Dense d(5, 4);
        CHECK(nn::grad_check(d, {3, 5}, 1) <= 1e-6);
    }
    {
        nn::Conv1D c(3, 4, 3);
        CHECK(nn::grad_check(c, {2, 3, 12}, 2) <= 1e-6);
    }
    {
        nn::GroupNorm gn(2, 4);
        CHECK(nn::grad_check(gn, {2, 4, 10}, 3) <= 1e-6);
    }
    {
        nn::SiLU s;
        CHECK(nn::grad_check(s, {2, 3, 7}, 4) <= 1e-6);
    }
    {
        nn::Down2 d;
        CHECK(nn::grad_check(d, {2, 3, 8}, 5) <= 1e-6);
    }
    {
        nn::Up2 u;
        CHECK(nn::grad_check(u, {2, 3, 8}, 6) <= 1e-6);
    }
}

TEST_CASE("composed stack gradient check") {
    SmallStack stack;
    CHECK(nn::grad_check(stack, {2, 3, 8}, 7) <= 1e-5);
}

TEST_CASE("zero input and params give zero dense gradient") {
    nn::Dense d(4, 4);
    for (auto* p : d.params()) p->fill(0.0);
    TensorBuf x({1, 4});
    x.fill(0.0);
    d.zero_grad();
    (void)d.forward(x);
    TensorBuf g({1, 4});
    g.fill(1.0);
    (void)d.backward(g);
    // dL/dW = g * x^T = 0 when x = 0
    for (std::size_t i = 0; i < d.grads()[0]->size(); ++i) CHECK((*d.grads()[0])[i] == 0.0);
}

TEST_CASE("backward without forward is rejected") {
    nn::Dense d(2, 2);
    TensorBuf g({1, 2});
    CHECK_THROWS_AS(d.backward(g), std::logic_error);
}

TEST_CASE("shape mismatch names the layer") {
    nn::Conv1D c(3, 4, 3);
    TensorBuf x({2, 5, 8});
    CHECK_THROWS_WITH(c.forward(x), Catch::Matchers::ContainsSubstring("Conv1D"));
}

TEST_CASE("downsample/upsample length round-trip") {
    nn::Down2 down;
    nn::Up2 up;
    TensorBuf x({1, 2, 12});
    Rng rng(8);
    for (auto& v : x.data) v = rng.gaussian();
    const TensorBuf y = up.forward(down.forward(x));
    REQUIRE(y.shape == x.shape);
    CHECK_THROWS_AS(down.forward(TensorBuf({1, 2, 7})), std::invalid_argument);
}

TEST_CASE("no NaN or Inf for large finite inputs") {
    SmallStack stack;
    Rng rng(9);
    for (auto* p : stack.params())
        for (auto& v : p->data) v = rng.gaussian(0.0, 0.25);
    TensorBuf x({1, 3, 8});
    for (auto& v : x.data) v = rng.uniform(-1e6, 1e6);
    const TensorBuf y = stack.forward(x);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::isfinite(y[i]));
    TensorBuf g(y.shape);
    g.fill(1.0);
    stack.zero_grad();
    (void)stack.forward(x);
    const TensorBuf gx = stack.backward(g);
    for (std::size_t i = 0; i < gx.size(); ++i) CHECK(std::isfinite(gx[i]));
}

TEST_CASE("positional embedding") {
    const auto e0 = nn::sinusoid_embed(0, 8);
    for (std::size_t i = 0; i < 8; i += 2) {
        CHECK(e0[i] == 0.0);
        CHECK(e0[i + 1] == 1.0);
    }
    const auto e1 = nn::sinusoid_embed(1, 4);
    CHECK(e1[0] == Catch::Approx(std::sin(1.0)));
    CHECK(e1[1] == Catch::Approx(std::cos(1.0)));
    CHECK(e1[2] == Catch::Approx(std::sin(std::pow(10000.0, -0.5))));
    CHECK(e1[3] == Catch::Approx(std::cos(std::pow(10000.0, -0.5))));
    const auto big = nn::sinusoid_embed(123456, 16);
    for (double v : big) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    CHECK_THROWS_AS(nn::sinusoid_embed(1, 5), std::invalid_argument);
}

TEST_CASE("style embedding buckets") {
    CHECK(nn::style_bucket(0.25, 20) == 5);
    CHECK(nn::style_bucket(1.0, 20) == 19);
    CHECK(nn::style_embed(0.3, 20, 8) == nn::style_embed(0.349, 20, 8));
    CHECK_THROWS_AS(nn::style_embed(0.0, 20, 8), std::invalid_argument);
    CHECK_THROWS_AS(nn::style_embed(1.1, 20, 8), std::invalid_argument);
}

TEST_CASE("adam update rule") {
    // zero gradients leave parameters untouched
    {
        nn::Adam opt(0.1);
        TensorBuf p({2});
        p[0] = 1.5;
        p[1] = -0.5;
        TensorBuf g({2});
        g.fill(0.0);
        opt.step({&p}, {&g});
        CHECK(p[0] == 1.5);
        CHECK(p[1] == -0.5);
    }
    // single scalar, one step from 0 with grad 1: delta ~ -lr
    {
        nn::Adam opt(1e-3);
        TensorBuf p({1});
        p[0] = 0.0;
        TensorBuf g({1});
        g[0] = 1.0;
        opt.step({&p}, {&g});
        CHECK(p[0] == Catch::Approx(-1e-3).epsilon(1e-4));
    }
    // determinism
    {
        auto run = [] {
            nn::Adam opt(1e-2);
            TensorBuf p({3});
            Rng rng(5);
            for (auto& v : p.data) v = rng.gaussian();
            for (int i = 0; i < 20; ++i) {
                TensorBuf g({3});
                for (auto& v : g.data) v = rng.gaussian();
                opt.step({&p}, {&g});
            }
            return p;
        };
        const TensorBuf a = run(), b = run();
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
    // shape mismatch rejected
    {
        nn::Adam opt;
        TensorBuf p({2}), g({3});
        CHECK_THROWS_AS(opt.step({&p}, {&g}), std::invalid_argument);
    }
}
