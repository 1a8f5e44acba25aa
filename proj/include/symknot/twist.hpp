#pragma once

#include <map>
#include <optional>
#include <vector>

#include "diagram.hpp"
#include "errors.hpp"
#include "net.hpp"

namespace symknot {

// Corners of an axis crossing, read with the axis vertical.
struct axis_frame {
    int nw, ne, sw, se;
    int type; // +1: SW-NE strand over, -1: NW-SE strand over
};

inline axis_frame frame_from_k(int k) {
    if (k == 3) return {2, 1, 3, 0, +1};
    return {1, 0, 2, 3, -1};
}

// Frames of all axis crossings. Without a mirror involution the frame is
// read off the orientation (positive crossings have the NW-SE strand over).
inline std::vector<std::optional<axis_frame>> axis_frames(const diagram& d) {
    std::vector<std::optional<axis_frame>> out(d.num_crossings());
    auto m = compute_mirror(d);
    for (int x = 0; x < d.num_crossings(); ++x) {
        if (!d.crossings[x].on_axis) continue;
        int k = m ? m->k[x] : (d.sign(x) > 0 ? 1 : 3);
        out[x] = frame_from_k(k);
    }
    return out;
}

namespace detail {

struct box_ports {
    net_port nw, ne, sw, se;
};

inline std::array<net_port, 4> slots_from_box(const axis_frame& f, const box_ports& b) {
    std::array<net_port, 4> r;
    r[f.nw] = b.nw;
    r[f.ne] = b.ne;
    r[f.sw] = b.sw;
    r[f.se] = b.se;
    return r;
}

// A vertical twist region of `count` crossings of the given type, stacked
// downward; count 0 is the vertical smoothing. Axis keys descend from
// key_top so that the top crossing ranks highest.
inline box_ports build_box(net& b, int count, int type, double key_base, std::optional<int> first_id) {
    if (count == 0) {
        int j1 = b.add_junction(), j2 = b.add_junction();
        return {{j1, 0}, {j2, 0}, {j1, 1}, {j2, 1}};
    }
    std::vector<int> cs;
    for (int i = 0; i < count; ++i) {
        double key = key_base + static_cast<double>(count - 1 - i) / count;
        cs.push_back(b.add_crossing(i == 0 ? first_id : std::nullopt, true, key));
    }
    // port of each corner on a box crossing
    int NW, NE, SW, SE;
    if (type > 0) NW = 0, SW = 1, SE = 2, NE = 3;
    else NE = 0, NW = 1, SW = 2, SE = 3;
    for (int i = 0; i + 1 < count; ++i) {
        b.connect({cs[i], SW}, {cs[i + 1], NW});
        b.connect({cs[i], SE}, {cs[i + 1], NE});
    }
    return {{cs.front(), NW}, {cs.front(), NE}, {cs.back(), SW}, {cs.back(), SE}};
}

} // namespace detail

// Replaces axis crossings by twist boxes. `count_of(x)` gives the signed
// box size for axis crossing x: positive keeps the crossing type.
template <class CountOf>
diagram twist_with(const diagram& d, CountOf&& count_of) {
    auto frames = axis_frames(d);
    return rebuild(d, [&](net& b, int x) -> std::optional<std::array<net_port, 4>> {
        if (!frames[x]) return std::nullopt;
        int h = count_of(x);
        auto& f = *frames[x];
        int type = h >= 0 ? f.type : -f.type;
        int n = h >= 0 ? h : -h;
        auto box = detail::build_box(b, n, type, *d.crossings[x].axis_index, d.crossings[x].id);
        return detail::slots_from_box(f, box);
    });
}

// D(h): every axis crossing becomes |h| crossings of the same (h > 0) or the
// opposite (h < 0) type; h = 0 leaves the vertical smoothing.
inline diagram twist(const diagram& d, int h) {
    return twist_with(d, [h](int) { return h; });
}

inline std::pair<int, int> axis_extremes(const diagram& d) {
    int top = -1, bottom = -1;
    for (int x = 0; x < d.num_crossings(); ++x) {
        if (!d.crossings[x].on_axis) continue;
        int i = *d.crossings[x].axis_index;
        if (top < 0 || i > *d.crossings[top].axis_index) top = x;
        if (bottom < 0 || i < *d.crossings[bottom].axis_index) bottom = x;
    }
    return {top, bottom};
}

// D(t, h, b): top axis crossing -> t crossings, bottom -> b, others -> h.
inline diagram twist_partial(const diagram& d, int t, int h, int b) {
    if (t < 0 || b < 0 || h < 1) throw invalid_designation("need t, b >= 0 and h >= 1");
    auto [top, bottom] = axis_extremes(d);
    if (top < 0 || top == bottom) throw invalid_designation("needs distinct top and bottom axis crossings");
    return twist_with(d, [&](int x) { return x == top ? t : x == bottom ? b : h; });
}

// Smooths axis crossings: choice 0 is horizontal (both arcs cross the axis),
// 1 vertical. `choice_of(x)` returns -1 to keep crossing x.
template <class ChoiceOf>
diagram resolve_with(const diagram& d, ChoiceOf&& choice_of) {
    auto frames = axis_frames(d);
    return rebuild(d, [&](net& b, int x) -> std::optional<std::array<net_port, 4>> {
        if (!frames[x]) return std::nullopt;
        int r = choice_of(x);
        if (r < 0) return std::nullopt;
        auto& f = *frames[x];
        if (r == 1) return detail::slots_from_box(f, detail::build_box(b, 0, 0, 0, std::nullopt));
        int top = b.add_junction(true), bot = b.add_junction(true);
        return detail::slots_from_box(f, {{top, 0}, {top, 1}, {bot, 0}, {bot, 1}});
    });
}

inline diagram resolve_axis_crossing(const diagram& d, int axis_index, int r) {
    if (r != 0 && r != 1) throw bad_index("resolution must be 0 or 1");
    int target = -1;
    for (int x = 0; x < d.num_crossings(); ++x)
        if (d.crossings[x].on_axis && *d.crossings[x].axis_index == axis_index) target = x;
    if (target < 0) throw bad_index("no axis crossing with index " + std::to_string(axis_index));
    return resolve_with(d, [&](int x) { return x == target ? r : -1; });
}

} // namespace symknot
