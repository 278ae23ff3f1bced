// Jump rules for every CTMC variant, shared between the state-space builders
// and the event-driven simulator so both act on one definition of the
// dynamics. Each enumerator calls fn(next_state, rate) once per enabled
// transition of the given state; rates are strictly positive.
//
// Rated batching moves whole batches of k jobs from the batcher pool y to
// the server pool at rate M(k) per formable batch. Instantaneous batching is
// modeled by keeping y < k and letting the arrival that completes a batch
// carry the k jobs into the server pool directly.
#pragma once

#include "batchmf/config.hpp"
#include "batchmf/ctmc.hpp"

#include <algorithm>

namespace batchmf {

// Rates fixed at the configured batch size(s).
struct SingleParams {
    int n, m, k;
    double lambda;
    double mu;            // mu(k), batches/s
    double M;             // M(k), batches/s; unused when instantaneous
    bool instantaneous;
};

struct TwoTypeParams {
    int n, m, k1, k2;
    double lambda, p;
    double mu1, mu2;
    double M1, M2;
    bool inst1, inst2;
};

inline SingleParams make_params(const SingleTypeConfig& c) {
    return {c.n, c.m, c.k, c.lambda, c.service.rate(c.k),
            c.batching ? c.batching->rate(c.k) : 0.0, !c.batching.has_value()};
}

inline TwoTypeParams make_params(const TwoTypeConfig& c) {
    return {c.n, c.m, c.k1, c.k2, c.lambda, c.p,
            c.service1.rate(c.k1), c.service2.rate(c.k2),
            c.batching1 ? c.batching1->rate(c.k1) : 0.0,
            c.batching2 ? c.batching2->rate(c.k2) : 0.0,
            !c.batching1.has_value(), !c.batching2.has_value()};
}

// Single type: s = (x, y, zk).
template <class F>
void for_each_transition_single(const StateTuple& s, const SingleParams& P, F&& fn) {
    const int x = s[0], y = s[1], zk = s[2];
    const int z = zk / P.k;

    if (x > 0) {
        if (P.instantaneous && y + 1 == P.k)
            fn(StateTuple{x - 1, 0, zk + P.k, 0, 0}, P.lambda * x);
        else
            fn(StateTuple{x - 1, y + 1, zk, 0, 0}, P.lambda * x);
    }
    if (!P.instantaneous && y >= P.k)
        fn(StateTuple{x, y - P.k, zk + P.k, 0, 0}, P.M * (y / P.k));
    if (z > 0)
        fn(StateTuple{x + P.k, y, zk - P.k, 0, 0}, P.mu * std::min(P.m, z));
}

// Two types, preemptive priority: s = (x, y1, y2, z1k1); the type-2 batch
// pool z2 is implicit via conservation. Type-1 batches always claim servers
// first (v1 = min(m, z1)); type-2 batches run on whatever remains.
template <class F>
void for_each_transition_two_preemptive(const StateTuple& s, const TwoTypeParams& P, F&& fn) {
    const int x = s[0], y1 = s[1], y2 = s[2], z1k1 = s[3];
    const int z1 = z1k1 / P.k1;
    const int z2 = (P.n - x - y1 - y2 - z1k1) / P.k2;
    const int v1 = std::min(P.m, z1);
    const int v2 = std::min(std::max(0, P.m - z1), z2);

    if (x > 0 && P.p > 0.0) {
        if (P.inst1 && y1 + 1 == P.k1)
            fn(StateTuple{x - 1, 0, y2, z1k1 + P.k1, 0}, P.lambda * x * P.p);
        else
            fn(StateTuple{x - 1, y1 + 1, y2, z1k1, 0}, P.lambda * x * P.p);
    }
    if (x > 0 && P.p < 1.0) {
        if (P.inst2 && y2 + 1 == P.k2)
            fn(StateTuple{x - 1, y1, 0, z1k1, 0}, P.lambda * x * (1.0 - P.p));
        else
            fn(StateTuple{x - 1, y1, y2 + 1, z1k1, 0}, P.lambda * x * (1.0 - P.p));
    }
    if (!P.inst1 && y1 >= P.k1)
        fn(StateTuple{x, y1 - P.k1, y2, z1k1 + P.k1, 0}, P.M1 * (y1 / P.k1));
    if (!P.inst2 && y2 >= P.k2) // batch joins the implicit z2 pool
        fn(StateTuple{x, y1, y2 - P.k2, z1k1, 0}, P.M2 * (y2 / P.k2));
    if (v1 > 0)
        fn(StateTuple{x + P.k1, y1, y2, z1k1 - P.k1, 0}, P.mu1 * v1);
    if (v2 > 0)
        fn(StateTuple{x + P.k2, y1, y2, z1k1, 0}, P.mu2 * v2);
}

// Two types, non-preemptive priority: s = (x, y1, y2, u1k1, v1k1) with u1
// type-1 batches queued behind full servers and v1 in service. A type-1
// batch formed while all m servers are busy queues instead of evicting a
// type-2 batch; every server freed while u1 > 0 goes to a queued type-1
// batch (promotion), so u1 > 0 implies v1 + v2 = m.
template <class F>
void for_each_transition_two_nonpreemptive(const StateTuple& s, const TwoTypeParams& P, F&& fn) {
    const int x = s[0], y1 = s[1], y2 = s[2], u1k1 = s[3], v1k1 = s[4];
    const int u1 = u1k1 / P.k1;
    const int v1 = v1k1 / P.k1;
    const int z2 = (P.n - x - y1 - y2 - u1k1 - v1k1) / P.k2;
    const int v2 = std::min(P.m - v1, z2);
    const int v = v1 + v2;

    auto type1_batch_formed = [&](int nx, int ny1, int ny2, double rate) {
        if (v == P.m)
            fn(StateTuple{nx, ny1, ny2, u1k1 + P.k1, v1k1}, rate);
        else
            fn(StateTuple{nx, ny1, ny2, u1k1, v1k1 + P.k1}, rate);
    };

    if (x > 0 && P.p > 0.0) {
        const double rate = P.lambda * x * P.p;
        if (P.inst1 && y1 + 1 == P.k1)
            type1_batch_formed(x - 1, 0, y2, rate);
        else
            fn(StateTuple{x - 1, y1 + 1, y2, u1k1, v1k1}, rate);
    }
    if (x > 0 && P.p < 1.0) {
        const double rate = P.lambda * x * (1.0 - P.p);
        if (P.inst2 && y2 + 1 == P.k2)
            fn(StateTuple{x - 1, y1, 0, u1k1, v1k1}, rate); // into the implicit z2 pool
        else
            fn(StateTuple{x - 1, y1, y2 + 1, u1k1, v1k1}, rate);
    }
    if (!P.inst1 && y1 >= P.k1)
        type1_batch_formed(x, y1 - P.k1, y2, P.M1 * (y1 / P.k1));
    if (!P.inst2 && y2 >= P.k2)
        fn(StateTuple{x, y1, y2 - P.k2, u1k1, v1k1}, P.M2 * (y2 / P.k2));
    if (v1 > 0) {
        const double rate = P.mu1 * v1;
        if (u1 > 0) // queued type-1 batch takes the freed server
            fn(StateTuple{x + P.k1, y1, y2, u1k1 - P.k1, v1k1}, rate);
        else
            fn(StateTuple{x + P.k1, y1, y2, u1k1, v1k1 - P.k1}, rate);
    }
    if (v2 > 0) {
        const double rate = P.mu2 * v2;
        if (u1 > 0) // promotion
            fn(StateTuple{x + P.k2, y1, y2, u1k1 - P.k1, v1k1 + P.k1}, rate);
        else
            fn(StateTuple{x + P.k2, y1, y2, u1k1, v1k1}, rate);
    }
}

// Per-state job completion rate (the throughput integrand).
inline double completion_rate_single(const StateTuple& s, const SingleParams& P) {
    return P.k * P.mu * std::min(P.m, s[2] / P.k);
}

inline double completion_rate_two_preemptive(const StateTuple& s, const TwoTypeParams& P) {
    const int z1 = s[3] / P.k1;
    const int z2 = (P.n - s[0] - s[1] - s[2] - s[3]) / P.k2;
    const int v1 = std::min(P.m, z1);
    const int v2 = std::min(std::max(0, P.m - z1), z2);
    return P.k1 * P.mu1 * v1 + P.k2 * P.mu2 * v2;
}

inline double completion_rate_two_nonpreemptive(const StateTuple& s, const TwoTypeParams& P) {
    const int v1 = s[4] / P.k1;
    const int z2 = (P.n - s[0] - s[1] - s[2] - s[3] - s[4]) / P.k2;
    const int v2 = std::min(P.m - v1, z2);
    return P.k1 * P.mu1 * v1 + P.k2 * P.mu2 * v2;
}

} // namespace batchmf
