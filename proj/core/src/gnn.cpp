/*
 * Copyright 2026 The pairnet Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pairnet/gnn.hpp"

#include "pairnet/flops.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pairnet::gnn {

namespace {

Affine zero_affine(int out, int in)
{
    return Affine{RMatrix::Zero(out, in), RVector::Zero(out)};
}

Affine random_affine(int out, int in, double scale, Rng& rng)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    Affine a = zero_affine(out, in);
    // row-major draw order matches the persisted layout
    for (int r = 0; r < out; ++r) {
        for (int c = 0; c < in; ++c) {
            a.weight(r, c) = u(rng);
        }
    }
    for (int r = 0; r < out; ++r) {
        a.bias(r) = u(rng);
    }
    return a;
}

// Visits every scalar parameter in the persisted order.
template <typename Params, typename Fn>
void for_each_parameter(Params& params, Fn&& fn)
{
    auto visit_affine = [&](auto& a) {
        for (Eigen::Index r = 0; r < a.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < a.weight.cols(); ++c) {
                fn(a.weight(r, c));
            }
        }
        for (Eigen::Index r = 0; r < a.bias.size(); ++r) {
            fn(a.bias(r));
        }
    };
    for (auto& block : params.blocks) {
        fn(block.eps);
        visit_affine(block.first);
        visit_affine(block.second);
    }
    visit_affine(params.head_hidden);
    visit_affine(params.head_out);
}

constexpr double negative_slope = 0.01;

RMatrix affine_rows(const RMatrix& x, const Affine& a)
{
    return (x * a.weight.transpose()).rowwise() + a.bias.transpose();
}

RMatrix relu(const RMatrix& x)
{
    return x.cwiseMax(negative_slope * x);
}

RMatrix relu_mask(const RMatrix& pre)
{
    return (pre.array() > 0.0).select(RMatrix::Ones(pre.rows(), pre.cols()), negative_slope);
}

struct BlockTrace {
    RMatrix input;
    RMatrix aggregated;
    RMatrix pre_activation;
    RMatrix hidden;
};

struct ForwardTrace {
    RMatrix adjacency;
    std::vector<BlockTrace> blocks;
    RMatrix final_features;
    RMatrix head_pre;
    RMatrix head_hidden;
    RVector scores;
    RVector p;
    Eigen::Index argmin = 0;
    Eigen::Index argmax = 0;
    double range = 0.0;
    bool degenerate = false;
};

void check_shapes(const wcg::Wcg& g, const GnnParams& params)
{
    if (g.num_nodes() < 1) {
        throw DomainError("graph has no nodes");
    }
    if (params.head_out.weight.rows() != 1 || params.width() < 1) {
        throw DomainError("malformed network parameters");
    }
    if (g.node_features().cols() != params.width()) {
        throw DomainError(fmt::format("node feature width {} does not match network width {}",
                                      g.node_features().cols(), params.width()));
    }
}

ForwardTrace run_forward(const wcg::Wcg& g, const GnnParams& params)
{
    check_shapes(g, params);
    ForwardTrace t;
    t.adjacency = g.weighted_adjacency();
    const double size_scale = 1.0 / g.num_nodes();

    RMatrix h = g.node_features();
    t.blocks.reserve(params.blocks.size());
    for (const FcbParams& block : params.blocks) {
        BlockTrace bt;
        bt.input = h;
        bt.aggregated = size_scale * ((1.0 + block.eps) * h + t.adjacency * h);
        bt.pre_activation = affine_rows(bt.aggregated, block.first);
        bt.hidden = relu(bt.pre_activation);
        h = affine_rows(bt.hidden, block.second);
        t.blocks.push_back(std::move(bt));
    }
    t.final_features = h;
    t.head_pre = affine_rows(h, params.head_hidden);
    t.head_hidden = relu(t.head_pre);
    t.scores = affine_rows(t.head_hidden, params.head_out).col(0);

    if (!t.scores.allFinite()) {
        throw NumericalError("non-finite activations in forward pass");
    }

    const double hi = t.scores.maxCoeff(&t.argmax);
    const double lo = t.scores.minCoeff(&t.argmin);
    t.range = hi - lo;
    const double scale = std::max({1.0, std::abs(hi), std::abs(lo)});
    t.degenerate = !(t.range > 1e-12 * scale);
    if (t.degenerate) {
        t.p = RVector::Constant(t.scores.size(), 0.5);
    } else {
        t.p = (t.scores.array() - lo) / t.range;
    }
    return t;
}

} // namespace

GnnParams GnnParams::zeros(int depth, int width)
{
    if (depth < 0 || width < 1) {
        throw DomainError(fmt::format("invalid network shape depth={} width={}", depth, width));
    }
    GnnParams p;
    p.blocks.resize(static_cast<std::size_t>(depth));
    for (auto& b : p.blocks) {
        b.eps = 0.0;
        b.first = zero_affine(width, width);
        b.second = zero_affine(width, width);
    }
    p.head_hidden = zero_affine(width, width);
    p.head_out = zero_affine(1, width);
    return p;
}

GnnParams GnnParams::random(int depth, int width, Rng& rng)
{
    GnnParams p = zeros(depth, width);
    const double scale = 1.0 / std::sqrt(static_cast<double>(width));
    std::uniform_real_distribution<double> u(-scale, scale);
    for (auto& b : p.blocks) {
        b.eps = u(rng);
        b.first = random_affine(width, width, scale, rng);
        b.second = random_affine(width, width, scale, rng);
    }
    p.head_hidden = random_affine(width, width, scale, rng);
    p.head_out = random_affine(1, width, scale, rng);
    return p;
}

std::size_t GnnParams::parameter_count() const
{
    std::size_t n = 0;
    for_each_parameter(*this, [&](double) { ++n; });
    return n;
}

RVector GnnParams::flatten() const
{
    RVector flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index i = 0;
    for_each_parameter(*this, [&](double v) { flat(i++) = v; });
    return flat;
}

void GnnParams::assign(const RVector& flat)
{
    if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
        throw DomainError("flat parameter vector has the wrong length");
    }
    Eigen::Index i = 0;
    for_each_parameter(*this, [&](double& v) { v = flat(i++); });
}

bool GnnParams::all_finite() const
{
    bool ok = true;
    for_each_parameter(*this, [&](double v) { ok = ok && std::isfinite(v); });
    return ok;
}

LossCoefficients LossCoefficients::for_graph(int num_nodes)
{
    const double pairs = binomial(num_nodes, 2);
    return LossCoefficients{pairs, pairs};
}

RMatrix fcb_forward(const RMatrix& aggregation, const RMatrix& h_in, const FcbParams& block)
{
    if (aggregation.rows() != h_in.rows() || aggregation.cols() != h_in.rows()) {
        throw DomainError("aggregation matrix does not match feature rows");
    }
    if (block.first.weight.cols() != h_in.cols()) {
        throw DomainError("block input width mismatch");
    }
    const double size_scale = 1.0 / static_cast<double>(h_in.rows());
    const RMatrix aggregated = size_scale * ((1.0 + block.eps) * h_in + aggregation * h_in);
    return affine_rows(relu(affine_rows(aggregated, block.first)), block.second);
}

RMatrix fcb_forward(const wcg::Wcg& g, const RMatrix& h_in, const FcbParams& block)
{
    return fcb_forward(g.weighted_adjacency(), h_in, block);
}

RVector scores(const wcg::Wcg& g, const GnnParams& params)
{
    return run_forward(g, params).scores;
}

NodeProbabilities forward(const wcg::Wcg& g, const GnnParams& params)
{
    return NodeProbabilities{run_forward(g, params).p};
}

double erdos_loss(const NodeProbabilities& p, const wcg::Wcg& g, const LossCoefficients& c)
{
    if (p.p.size() != g.num_nodes()) {
        throw DomainError("probability vector does not match graph size");
    }
    double edge_term = 0.0;
    for (const wcg::Edge& e : g.edges()) {
        edge_term += g.norm_weight(e.i, e.j) * p.p(e.i) * p.p(e.j);
    }
    // sum over ordered pairs i != j, halved
    const double total = p.p.sum();
    const double pair_term = 0.5 * (total * total - p.p.squaredNorm());
    return c.gamma - (c.beta_loss + 1.0) * edge_term + c.beta_loss * pair_term;
}

LossGradient loss_gradient(const wcg::Wcg& g, const GnnParams& params, const LossCoefficients& c)
{
    const ForwardTrace t = run_forward(g, params);
    const Eigen::Index n = t.p.size();

    LossGradient out;
    out.probabilities.p = t.p;
    out.loss = erdos_loss(out.probabilities, g, c);
    out.gradient = GnnParams::zeros(params.depth(), params.width());

    // dL/dp_i = -(beta+1) sum_j A_ij p_j + beta (sum_j p_j - p_i)
    const RVector grad_p = -(c.beta_loss + 1.0) * (t.adjacency * t.p)
                         + c.beta_loss * (RVector::Constant(n, t.p.sum()) - t.p);

    RVector grad_s = RVector::Zero(n);
    if (!t.degenerate) {
        const double inv = 1.0 / t.range;
        const RVector offset = (t.scores.array() - t.scores(t.argmin)).matrix();
        grad_s = inv * grad_p;
        const double weighted = grad_p.dot(offset) * inv * inv;
        grad_s(t.argmin) += -inv * grad_p.sum() + weighted;
        grad_s(t.argmax) += -weighted;
    }

    // head_out: s = head_hidden_act * w^T + b
    GnnParams& gp = out.gradient;
    gp.head_out.weight = grad_s.transpose() * t.head_hidden;
    gp.head_out.bias(0) = grad_s.sum();
    RMatrix grad_pre = (grad_s * params.head_out.weight).cwiseProduct(relu_mask(t.head_pre));
    gp.head_hidden.weight = grad_pre.transpose() * t.final_features;
    gp.head_hidden.bias = grad_pre.colwise().sum().transpose();
    RMatrix grad_h = grad_pre * params.head_hidden.weight;

    const double size_scale = 1.0 / static_cast<double>(n);
    for (int b = params.depth() - 1; b >= 0; --b) {
        const FcbParams& block = params.blocks[static_cast<std::size_t>(b)];
        const BlockTrace& bt = t.blocks[static_cast<std::size_t>(b)];
        FcbParams& gb = gp.blocks[static_cast<std::size_t>(b)];

        gb.second.weight = grad_h.transpose() * bt.hidden;
        gb.second.bias = grad_h.colwise().sum().transpose();
        const RMatrix grad_z = (grad_h * block.second.weight).cwiseProduct(relu_mask(bt.pre_activation));
        gb.first.weight = grad_z.transpose() * bt.aggregated;
        gb.first.bias = grad_z.colwise().sum().transpose();
        const RMatrix grad_m = grad_z * block.first.weight;

        gb.eps = size_scale * bt.input.cwiseProduct(grad_m).sum();
        // adjacency is symmetric
        grad_h = size_scale * ((1.0 + block.eps) * grad_m + t.adjacency * grad_m);
    }

    if (!std::isfinite(out.loss) || !gp.all_finite()) {
        throw NumericalError("non-finite loss or gradient");
    }
    return out;
}

namespace {

std::vector<int> descending_order(const NodeProbabilities& p)
{
    std::vector<int> order(static_cast<std::size_t>(p.p.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p.p(a) > p.p(b); });
    return order;
}

DecodeResult sequential_decode(const NodeProbabilities& p, const wcg::Wcg& g, std::optional<int> limit)
{
    if (p.p.size() != g.num_nodes()) {
        throw DomainError("probability vector does not match graph size");
    }
    DecodeResult out;
    for (int v : descending_order(p)) {
        if (limit && static_cast<int>(out.nodes.size()) >= *limit) {
            break;
        }
        const bool adjacent_to_all = std::all_of(out.nodes.begin(), out.nodes.end(),
                                                 [&](int u) { return g.has_edge(u, v); });
        if (adjacent_to_all) {
            out.nodes.push_back(v);
        }
    }
    out.complete = !limit || static_cast<int>(out.nodes.size()) == *limit;
    return out;
}

} // namespace

UserSubset decode_max_clique(const NodeProbabilities& p, const wcg::Wcg& g)
{
    return sequential_decode(p, g, std::nullopt).nodes;
}

DecodeResult decode_k_clique(const NodeProbabilities& p, const wcg::Wcg& g, int k)
{
    if (k < 1) {
        throw DomainError(fmt::format("k must be >= 1, got {}", k));
    }
    return sequential_decode(p, g, k);
}

PairingResult pair_users(const channel::ChannelSet& channels,
                         int k,
                         double beta_sparsify,
                         const GnnParams& params)
{
    const Stopwatch clock;
    const wcg::Wcg complete = wcg::build_wcg(channels, k, params.width());
    const wcg::Wcg graph = wcg::sparsify(complete, beta_sparsify);
    const NodeProbabilities p = forward(graph, params);
    const DecodeResult decoded = decode_k_clique(p, graph, k);

    PairingResult result;
    result.method = Method::kclique;
    result.subset = decoded.nodes;
    result.complete = decoded.complete;
    const precoding::Capacity capacity = precoding::zfbf_capacity(channels, result.subset);
    result.sum_rate = capacity.sum_rate;
    result.schedulable = capacity.schedulable;
    result.wall_time = clock.seconds();

    flops::FlopsScenario fs;
    fs.num_users = channels.num_users();
    fs.group_size = k;
    fs.num_antennas = channels.num_antennas();
    fs.gnn_depth = params.depth();
    fs.gnn_width = params.width();
    fs.num_edges = static_cast<std::uint64_t>(graph.num_edges());
    result.flops = flops::count_flops(Method::kclique, fs).total();
    return result;
}

} // namespace pairnet::gnn
