#include "sweptvol/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "sweptvol/parallel.hpp"

namespace sweptvol {

//---------------------------------------------------------------------------//
// WeightGrid
//---------------------------------------------------------------------------//

void WeightGrid::validate() const
{
    std::size_t n = 1;
    for (auto d : dims)
    {
        if (d < 2)
            throw InvalidInput("weight grid needs at least 2 samples per axis");
        n *= d;
    }
    if (values.size() != n)
        throw InvalidInput("weight grid sample count does not match its dimensions");
    if (!((bounds.max.array() > bounds.min.array()).all()))
        throw InvalidInput("weight grid bounds must have positive extent");
    for (double v : values)
    {
        if (!std::isfinite(v) || v < 0)
            throw InvalidInput("weight grid samples must be finite and non-negative");
    }
}

double WeightGrid::operator()(Vec3 const& p) const
{
    std::array<std::uint32_t, 3> i0{};
    std::array<double, 3> f{};
    for (int k = 0; k < 3; ++k)
    {
        double h = (bounds.max[k] - bounds.min[k]) / (dims[k] - 1);
        double x = std::clamp((p[k] - bounds.min[k]) / h, 0.0, double(dims[k] - 1));
        auto c = std::min<std::uint32_t>(std::uint32_t(x), dims[k] - 2);
        i0[k] = c;
        f[k] = x - c;
    }
    auto at = [&](std::uint32_t x, std::uint32_t y, std::uint32_t z) {
        return values[(std::size_t(z) * dims[1] + y) * dims[0] + x];
    };
    double v = 0.0;
    for (int c = 0; c < 8; ++c)
    {
        int bx = c & 1, by = (c >> 1) & 1, bz = (c >> 2) & 1;
        double w = (bx ? f[0] : 1 - f[0]) * (by ? f[1] : 1 - f[1]) * (bz ? f[2] : 1 - f[2]);
        if (w != 0)
            v += w * at(i0[0] + bx, i0[1] + by, i0[2] + bz);
    }
    return v;
}

double WeightGrid::integral(Box3 const& box) const
{
    // The interpolant is linear in each coordinate between grid planes (and
    // constant beyond the bounds), so the midpoint rule is exact per brick.
    std::array<std::vector<double>, 3> cuts;
    for (int k = 0; k < 3; ++k)
    {
        auto& c = cuts[k];
        double lo = box.min[k], hi = box.max[k];
        c.push_back(lo);
        double h = (bounds.max[k] - bounds.min[k]) / (dims[k] - 1);
        for (std::uint32_t i = 0; i < dims[k]; ++i)
        {
            double x = bounds.min[k] + i * h;
            if (x > lo && x < hi)
                c.push_back(x);
        }
        c.push_back(hi);
    }
    double sum = 0.0;
    for (std::size_t z = 0; z + 1 < cuts[2].size(); ++z)
    {
        for (std::size_t y = 0; y + 1 < cuts[1].size(); ++y)
        {
            for (std::size_t x = 0; x + 1 < cuts[0].size(); ++x)
            {
                Vec3 lo(cuts[0][x], cuts[1][y], cuts[2][z]);
                Vec3 hi(cuts[0][x + 1], cuts[1][y + 1], cuts[2][z + 1]);
                sum += (hi - lo).prod() * (*this)(0.5 * (lo + hi));
            }
        }
    }
    return sum;
}

void SweepParams::validate() const
{
    if (time_samples < 2)
        throw InvalidInput("time_samples must be at least 2");
    if (!(contact_tol > 0))
        throw InvalidInput("contact_tol must be positive");
    if (max_cells < 1)
        throw InvalidInput("max_cells must be at least 1");
    if (!(empty_split_fraction >= 0))
        throw InvalidInput("empty_split_fraction must be non-negative");
    if (weight)
        weight->validate();
}

//---------------------------------------------------------------------------//
// CellTree
//---------------------------------------------------------------------------//

CellTree::CellTree(Box3 const& bound)
{
    SplitNode root;
    root.box = bound;
    root.cell = 0;
    nodes_.push_back(root);
    leaves_ = 1;
}

int CellTree::depth() const
{
    int d = 0;
    for (auto const& n : nodes_)
    {
        if (n.axis < 0)
            d = std::max(d, n.depth);
    }
    return d;
}

std::pair<std::int32_t, std::int32_t> CellTree::split(std::int32_t node, int axis, double position)
{
    if (node < 0 || std::size_t(node) >= nodes_.size() || nodes_[node].axis >= 0)
        throw InvalidInput("split target is not a leaf");
    if (axis < 0 || axis > 2)
        throw InvalidInput("split axis out of range");
    Box3 box = nodes_[node].box;
    if (!(position > box.min[axis] && position < box.max[axis]))
        throw InvalidInput("split position must lie strictly inside the cell");

    SplitNode lo, hi;
    lo.box = box;
    lo.box.max[axis] = position;
    hi.box = box;
    hi.box.min[axis] = position;
    lo.depth = hi.depth = nodes_[node].depth + 1;

    auto l = std::int32_t(nodes_.size());
    nodes_.push_back(lo);
    nodes_.push_back(hi);
    auto& parent = nodes_[node];
    parent.axis = axis;
    parent.position = position;
    parent.left = l;
    parent.right = l + 1;
    parent.cell = -1;
    ++leaves_;
    return {l, l + 1};
}

std::vector<Box3> CellTree::finalize()
{
    std::vector<Box3> boxes;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty())
    {
        auto i = stack.back();
        stack.pop_back();
        auto& n = nodes_[i];
        if (n.axis < 0)
        {
            n.cell = std::int32_t(boxes.size());
            boxes.push_back(n.box);
        }
        else
        {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    return boxes;
}

LocateResult CellTree::locate(Vec3 const& p) const
{
    LocateResult r;
    if (nodes_.empty())
        return r;
    std::int32_t i = 0;
    r.visits = 1;
    if (!nodes_[0].box.contains(p))
        return r;
    while (nodes_[i].axis >= 0)
    {
        auto const& n = nodes_[i];
        i = p[n.axis] <= n.position ? n.left : n.right;
        ++r.visits;
    }
    r.cell = std::size_t(nodes_[i].cell);
    return r;
}

std::vector<std::size_t> CellTree::overlapping(Box3 const& b) const
{
    std::vector<std::size_t> out;
    if (nodes_.empty() || !nodes_[0].box.intersects(b))
        return out;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty())
    {
        auto const& n = nodes_[stack.back()];
        stack.pop_back();
        if (n.axis < 0)
        {
            out.push_back(std::size_t(n.cell));
            continue;
        }
        if (b.min[n.axis] <= n.position)
            stack.push_back(n.left);
        if (b.max[n.axis] >= n.position)
            stack.push_back(n.right);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<RayCell> CellTree::along_ray(Ray const& ray) const
{
    std::vector<RayCell> out;
    if (nodes_.empty())
        return out;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty())
    {
        auto const& n = nodes_[stack.back()];
        stack.pop_back();
        auto span = clip_ray(ray, n.box);
        if (!span)
            continue;
        if (n.axis < 0)
            out.push_back({std::size_t(n.cell), (*span)[0], (*span)[1]});
        else
        {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    std::sort(out.begin(), out.end(), [](RayCell const& a, RayCell const& b) {
        return a.s0 < b.s0 || (a.s0 == b.s0 && a.cell < b.cell);
    });
    return out;
}

CellTree CellTree::from_nodes(std::vector<SplitNode> nodes)
{
    if (nodes.empty())
        throw InvalidInput("cell tree has no nodes");
    CellTree tree;
    tree.nodes_ = std::move(nodes);
    auto& ns = tree.nodes_;
    ns[0].depth = 0;
    std::vector<char> seen(ns.size(), 0);
    std::vector<std::int32_t> stack{0};
    std::size_t leaves = 0;
    while (!stack.empty())
    {
        auto i = stack.back();
        stack.pop_back();
        if (seen[i])
            throw InvalidInput("cell tree node reached twice");
        seen[i] = 1;
        auto& n = ns[i];
        if (n.axis < 0)
        {
            ++leaves;
            continue;
        }
        if (n.axis > 2 || n.left < 0 || n.right < 0 || std::size_t(n.left) >= ns.size()
            || std::size_t(n.right) >= ns.size())
            throw InvalidInput("cell tree node has invalid children");
        if (!(n.position > n.box.min[n.axis] && n.position < n.box.max[n.axis]))
            throw InvalidInput("cell tree split position outside its node");
        Box3 lo = n.box, hi = n.box;
        lo.max[n.axis] = n.position;
        hi.min[n.axis] = n.position;
        ns[n.left].box = lo;
        ns[n.right].box = hi;
        ns[n.left].depth = ns[n.right].depth = n.depth + 1;
        stack.push_back(n.right);
        stack.push_back(n.left);
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw InvalidInput("cell tree has unreachable nodes");
    tree.leaves_ = leaves;
    tree.finalize();
    return tree;
}

//---------------------------------------------------------------------------//
// Bounds and cost
//---------------------------------------------------------------------------//

Box3 bounding_box_swept(LocalImplicitRep const& base, RigidMotion const& motion)
{
    Ball3 s = bounding_sphere(base);
    double pad = s.radius + s.centre.norm();
    Box3 box;
    for (int k = 0; k < 3; ++k)
    {
        auto [lo, hi] = motion.translation()[k].range(motion.lower(), motion.upper());
        box.min[k] = lo - pad;
        box.max[k] = hi + pad;
    }
    return box;
}

namespace {

double cell_measure(Box3 const& box, std::optional<WeightGrid> const& weight)
{
    return weight ? weight->integral(box) : box.volume();
}

}  // namespace

double partition_cost(std::vector<SweptCell> const& cells, std::optional<WeightGrid> const& weight)
{
    if (cells.empty())
        throw InvalidInput("partition has no cells");
    double sum = 0.0, norm = 0.0;
    for (auto const& c : cells)
    {
        double tau = 0.0;
        for (auto const& e : c.entries)
            tau += e.t1 - e.t0;
        double m = cell_measure(c.box, weight);
        sum += m * double(c.entries.size()) * tau;
        norm += weight ? m : 1.0;
    }
    double cost = std::log(double(cells.size()));
    if (norm > 0)
        cost += sum / norm;
    return cost;
}

//---------------------------------------------------------------------------//
// Partition
//---------------------------------------------------------------------------//

namespace {

Box3 moved_area_box(Area const& area, Isometry const& iso)
{
    if (auto const* b = std::get_if<Ball3>(&area))
        return Ball3(iso.apply(b->centre), b->radius).bounding_box();
    auto const& box = std::get<Box3>(area);
    Vec3 c = iso.apply(box.center());
    Vec3 e = iso.rotation.cwiseAbs() * (0.5 * box.extents());
    return {c - e, c + e};
}

int depth_budget(std::size_t cells)
{
    // ceil(log2(cells)) for cells >= 1
    int b = 0;
    while ((std::size_t(1) << b) < cells)
        ++b;
    return b;
}

struct SplitChoice
{
    int axis = -1;
    double position = 0.0;
    std::size_t count = 0;
};

class Partitioner
{
  public:
    Partitioner(LocalImplicitRep const& base, RigidMotion const& motion, SweepParams const& params)
        : params_(params)
    {
        bound_ = bounding_box_swept(base, motion);
        mt_ = std::size_t(params.time_samples);
        double a = motion.lower(), b = motion.upper();
        dt_ = (b - a) / double(mt_);
        snaps_.resize(base.size() * mt_);
        parallel_for(mt_, [&](std::size_t k) {
            double t = k + 1 == mt_ ? b : a + double(k) * (b - a) / double(mt_ - 1);
            Isometry iso = motion.at(t);
            for (std::size_t i = 0; i < base.size(); ++i)
                snaps_[i * mt_ + k] = moved_area_box(base.patches[i].area, iso);
        });
        if (params.weight)
        {
            norm_ = params.weight->integral(bound_);
            if (!(norm_ > 0))
                throw InvalidInput("weight integrates to zero over the swept bound");
        }
        tree_ = CellTree(bound_);
        Leaf root;
        root.node = 0;
        root.snaps.resize(snaps_.size());
        for (std::size_t s = 0; s < snaps_.size(); ++s)
            root.snaps[s] = std::uint32_t(s);
        update(root);
        leaves_.push_back(std::move(root));
        node_leaf_.push_back(0);
        sum_ = leaves_[0].term;
    }

    void seed_along_path(LocalImplicitRep const& base, RigidMotion const& motion)
    {
        Vec3 centre = bounding_sphere(base).centre;
        double a = motion.lower(), b = motion.upper();
        for (std::size_t k = 1; k + 1 < mt_ && cells() < params_.max_cells; ++k)
        {
            double t = a + double(k) * (b - a) / double(mt_ - 1);
            Vec3 x = motion.apply(t, centre);
            int axis = 0;
            double best = -1;
            for (int d = 0; d < 3; ++d)
            {
                double s = std::abs(motion.translation()[d].derivative()(t));
                if (s > best)
                {
                    best = s;
                    axis = d;
                }
            }
            auto loc = locate_leaf(x);
            if (loc < 0)
                continue;
            auto const& n = tree_.nodes()[leaves_[loc].node];
            if (n.depth + 1 > depth_budget(cells() + 1))
                continue;
            if (!(x[axis] > n.box.min[axis] && x[axis] < n.box.max[axis]))
                continue;
            SplitChoice c{axis, x[axis], 0};
            Leaf lo, hi;
            make_children(leaves_[loc], c, lo, hi);
            commit(std::size_t(loc), c, std::move(lo), std::move(hi));
            ++seed_splits_;
        }
    }

    void cost_driven()
    {
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item> heap;
        std::vector<std::vector<std::size_t>> deferred;
        auto push = [&](std::size_t leaf) {
            auto d = std::size_t(tree_.nodes()[leaves_[leaf].node].depth);
            if (int(d) + 1 <= depth_budget(cells() + 1))
                heap.push({leaves_[leaf].measure, leaf});
            else
            {
                if (deferred.size() <= d)
                    deferred.resize(d + 1);
                deferred[d].push_back(leaf);
            }
        };
        auto release = [&] {
            int budget = depth_budget(cells() + 1);
            for (std::size_t d = 0; d < deferred.size(); ++d)
            {
                if (int(d) + 1 > budget)
                    break;
                for (auto leaf : deferred[d])
                    heap.push({leaves_[leaf].measure, leaf});
                deferred[d].clear();
            }
        };
        for (std::size_t i = 0; i < leaves_.size(); ++i)
            push(i);

        history_.push_back(cost());
        while (cells() < params_.max_cells)
        {
            release();
            if (heap.empty())
                break;
            auto leaf = heap.top().second;
            heap.pop();
            auto const& n = tree_.nodes()[leaves_[leaf].node];
            if (n.depth + 1 > depth_budget(cells() + 1))
            {
                push(leaf);
                continue;
            }
            auto choice = best_split(leaves_[leaf]);
            if (choice.axis < 0)
                continue;

            Leaf lo, hi;
            make_children(leaves_[leaf], choice, lo, hi);
            double norm = params_.weight ? norm_ : double(cells() + 1);
            double next = std::log(double(cells() + 1))
                          + (sum_ - leaves_[leaf].term + lo.term + hi.term) / norm;
            if (!(next < history_.back()))
                break;
            auto [a, b] = commit(leaf, choice, std::move(lo), std::move(hi));
            history_.push_back(next);
            push(a);
            push(b);
        }
    }

    void empty_splits()
    {
        double total = bound_.surface_area();
        double mean_w = params_.weight ? norm_ / bound_.volume() : 1.0;
        double threshold = params_.empty_split_fraction * total;
        double gap = 1e-9 * bound_.diagonal();
        std::vector<std::size_t> work;
        for (std::size_t i = 0; i < leaves_.size(); ++i)
            work.push_back(i);
        while (!work.empty() && cells() < params_.max_cells)
        {
            auto leaf = work.back();
            work.pop_back();
            auto const& L = leaves_[leaf];
            auto const& n = tree_.nodes()[L.node];
            if (L.snaps.empty() || n.depth + 1 > depth_budget(cells() + 1))
                continue;
            Box3 cell = n.box;
            Box3 occupied = Box3::empty();
            for (auto s : L.snaps)
                occupied.expand(snaps_[s]);

            double best_vol = 0.0;
            int best_axis = -1;
            double best_pos = 0.0;
            for (int k = 0; k < 3; ++k)
            {
                for (int side = 0; side < 2; ++side)
                {
                    bool on_bound = side == 0 ? cell.min[k] == bound_.min[k]
                                              : cell.max[k] == bound_.max[k];
                    if (!on_bound)
                        continue;
                    double pos = side == 0 ? occupied.min[k] - gap : occupied.max[k] + gap;
                    if (!(pos > cell.min[k] + gap && pos < cell.max[k] - gap))
                        continue;
                    Box3 empty = cell;
                    if (side == 0)
                        empty.max[k] = pos;
                    else
                        empty.min[k] = pos;
                    Vec3 e = cell.extents();
                    double face = e[(k + 1) % 3] * e[(k + 2) % 3];
                    if (params_.weight)
                        face *= params_.weight->integral(empty) / (empty.volume() * mean_w);
                    if (face < threshold)
                        continue;
                    double vol = empty.volume();
                    if (vol > best_vol)
                    {
                        best_vol = vol;
                        best_axis = k;
                        best_pos = pos;
                    }
                }
            }
            if (best_axis < 0)
                continue;
            SplitChoice c{best_axis, best_pos, 0};
            Leaf lo, hi;
            make_children(leaves_[leaf], c, lo, hi);
            auto [a, b] = commit(leaf, c, std::move(lo), std::move(hi));
            ++empty_splits_;
            work.push_back(leaves_[a].snaps.empty() ? b : a);
        }
    }

    PartitionResult result()
    {
        PartitionResult r;
        r.cells = tree_.finalize();
        r.snapshot_hits.assign(r.cells.size(), 0);
        for (auto const& L : leaves_)
            r.snapshot_hits[std::size_t(tree_.nodes()[L.node].cell)] = L.snaps.size();
        r.cost_history = history_;
        r.snapshot_total = snaps_.size();
        r.empty_splits = empty_splits_;
        r.seed_splits = seed_splits_;
        r.tree = std::move(tree_);
        return r;
    }

  private:
    struct Leaf
    {
        std::int32_t node = 0;
        std::vector<std::uint32_t> snaps;  //!< ascending, grouped by area
        double measure = 0.0;
        double term = 0.0;
    };

    std::size_t cells() const { return leaves_.size(); }

    double cost() const
    {
        double norm = params_.weight ? norm_ : double(cells());
        return std::log(double(cells())) + sum_ / norm;
    }

    void update(Leaf& L) const
    {
        Box3 const& box = tree_.nodes()[L.node].box;
        update(L, box);
    }

    void update(Leaf& L, Box3 const& box) const
    {
        L.measure = cell_measure(box, params_.weight);
        std::size_t distinct = 0;
        std::size_t prev = std::numeric_limits<std::size_t>::max();
        for (auto s : L.snaps)
        {
            std::size_t area = s / mt_;
            if (area != prev)
                ++distinct;
            prev = area;
        }
        L.term = L.measure * double(distinct) * (double(L.snaps.size()) * dt_);
    }

    std::int32_t locate_leaf(Vec3 const& p) const
    {
        auto const& ns = tree_.nodes();
        if (!ns[0].box.contains(p))
            return -1;
        std::int32_t i = 0;
        while (ns[i].axis >= 0)
            i = p[ns[i].axis] <= ns[i].position ? ns[i].left : ns[i].right;
        return std::int32_t(node_leaf_[i]);
    }

    SplitChoice best_split(Leaf const& L) const
    {
        Box3 const& box = tree_.nodes()[L.node].box;
        SplitChoice best;
        double best_score = std::numeric_limits<double>::infinity();
        double best_off = std::numeric_limits<double>::infinity();
        std::size_t n = L.snaps.size();
        std::vector<double> lo(n), hi(n), area_lo, area_hi, events;
        for (int k = 0; k < 3; ++k)
        {
            double a = box.min[k], b = box.max[k];
            double mid = 0.5 * (a + b);
            if (!(mid > a && mid < b))
                continue;
            area_lo.clear();
            area_hi.clear();
            std::size_t prev = std::numeric_limits<std::size_t>::max();
            for (std::size_t s = 0; s < n; ++s)
            {
                Box3 const& sb = snaps_[L.snaps[s]];
                lo[s] = sb.min[k];
                hi[s] = sb.max[k];
                std::size_t area = L.snaps[s] / mt_;
                if (area != prev)
                {
                    area_lo.push_back(lo[s]);
                    area_hi.push_back(hi[s]);
                    prev = area;
                }
                else
                {
                    area_lo.back() = std::min(area_lo.back(), lo[s]);
                    area_hi.back() = std::max(area_hi.back(), hi[s]);
                }
            }
            events.clear();
            for (std::size_t s = 0; s < n; ++s)
            {
                if (lo[s] > a && lo[s] < b)
                    events.push_back(lo[s]);
                if (hi[s] > a && hi[s] < b)
                    events.push_back(hi[s]);
            }
            std::sort(lo.begin(), lo.end());
            std::sort(hi.begin(), hi.end());
            std::sort(area_lo.begin(), area_lo.end());
            std::sort(area_hi.begin(), area_hi.end());
            std::sort(events.begin(), events.end());
            events.erase(std::unique(events.begin(), events.end()), events.end());

            auto below = [](std::vector<double> const& v, double p) {
                return double(std::upper_bound(v.begin(), v.end(), p) - v.begin());
            };
            auto above = [](std::vector<double> const& v, double p) {
                return double(v.end() - std::lower_bound(v.begin(), v.end(), p));
            };
            auto consider = [&](double p) {
                if (!(p > a && p < b))
                    return;
                // c1 = [a, p] meets boxes with lo <= p, c2 = [p, b] those with hi >= p.
                double n1 = below(lo, p), n2 = above(hi, p);
                double d1 = below(area_lo, p), d2 = above(area_hi, p);
                Box3 b1 = box, b2 = box;
                b1.max[k] = p;
                b2.min[k] = p;
                double m1 = b1.volume(), m2 = b2.volume();
                if (params_.weight)
                {
                    m1 *= (*params_.weight)(b1.center());
                    m2 *= (*params_.weight)(b2.center());
                }
                double score = m1 * d1 * n1 + m2 * d2 * n2;
                double off = std::abs(p - mid) / (b - a);
                if (best.axis < 0 || score < best_score || (score == best_score && off < best_off))
                {
                    best = {k, p, std::size_t(n1 + n2)};
                    best_score = score;
                    best_off = off;
                }
            };
            consider(mid);
            std::size_t stride = std::max<std::size_t>(1, events.size() / max_candidates);
            for (std::size_t e = 0; e < events.size(); e += stride)
                consider(events[e]);
        }
        return best;
    }

    void make_children(Leaf const& parent, SplitChoice const& c, Leaf& lo, Leaf& hi) const
    {
        for (auto s : parent.snaps)
        {
            if (snaps_[s].min[c.axis] <= c.position)
                lo.snaps.push_back(s);
            if (snaps_[s].max[c.axis] >= c.position)
                hi.snaps.push_back(s);
        }
        Box3 box = tree_.nodes()[parent.node].box;
        Box3 lb = box, hb = box;
        lb.max[c.axis] = c.position;
        hb.min[c.axis] = c.position;
        update(lo, lb);
        update(hi, hb);
    }

    std::pair<std::size_t, std::size_t>
    commit(std::size_t leaf, SplitChoice const& c, Leaf lo, Leaf hi)
    {
        sum_ += lo.term + hi.term - leaves_[leaf].term;
        auto [ln, hn] = tree_.split(leaves_[leaf].node, c.axis, c.position);
        lo.node = ln;
        hi.node = hn;
        leaves_[leaf] = std::move(lo);
        leaves_.push_back(std::move(hi));
        node_leaf_.resize(tree_.nodes().size(), 0);
        node_leaf_[ln] = leaf;
        node_leaf_[hn] = leaves_.size() - 1;
        return {leaf, leaves_.size() - 1};
    }

    static constexpr std::size_t max_candidates = 256;

    SweepParams const& params_;
    Box3 bound_;
    std::size_t mt_ = 2;
    double dt_ = 0.0;
    double norm_ = 1.0;
    std::vector<Box3> snaps_;
    CellTree tree_;
    std::vector<Leaf> leaves_;
    std::vector<std::size_t> node_leaf_;
    double sum_ = 0.0;
    std::vector<double> history_;
    std::size_t empty_splits_ = 0;
    std::size_t seed_splits_ = 0;
};

}  // namespace

PartitionResult partition_cells(LocalImplicitRep const& base, RigidMotion const& motion,
                                SweepParams const& params)
{
    params.validate();
    base.validate();
    if (base.size() == 0)
        throw InvalidInput("base representation has no patches");
    Partitioner p(base, motion, params);
    if (params.seed_splits_along_path)
        p.seed_along_path(base, motion);
    p.cost_driven();
    p.empty_splits();
    return p.result();
}

//---------------------------------------------------------------------------//
// Exact entries
//---------------------------------------------------------------------------//

namespace {

struct PairHit
{
    std::size_t cell;
    CellEntry entry;
};

struct PriorContact
{
    Box3 cell;
    TimeInterval interval;
};

}  // namespace

SweptVolumeRep build_swept_rep(LocalImplicitRep const& base, RigidMotion const& motion,
                               SweepParams const& params, SweepStats* stats)
{
    PartitionResult part = partition_cells(base, motion, params);
    CellTree const& tree = part.tree;
    auto const& boxes = part.cells;

    double a = motion.lower(), b = motion.upper();
    std::size_t segs = std::size_t(params.time_samples);
    ContactOptions opt{params.contact_tol, params.fast_mode, params.time_samples};
    double slack = 1e-12 * tree.bound().diagonal();

    std::vector<std::vector<PairHit>> per_area(base.size());
    std::vector<std::size_t> solved(base.size(), 0), pruned(base.size(), 0);

    parallel_for(base.size(), [&](std::size_t i) {
        Area const& area = base.patches[i].area;
        Vec3 c = area_centre(area);
        double radius = area_radius(area);
        double cn = c.norm();

        // Cells the area can reach during each time segment.
        std::vector<std::pair<std::size_t, std::size_t>> reach;  // (cell, segment)
        Vec3 prev = motion.apply(a, c);
        for (std::size_t s = 0; s < segs; ++s)
        {
            double t0 = a + (b - a) * double(s) / double(segs);
            double t1 = s + 1 == segs ? b : a + (b - a) * double(s + 1) / double(segs);
            Vec3 next = motion.apply(t1, c);
            double h = t1 - t0;
            double lip = h > 0 ? motion.speed_bound(t0, t1, cn) : 0.0;
            Box3 tube(prev.cwiseMin(next), prev.cwiseMax(next));
            tube = tube.inflated(0.5 * lip * h + radius + slack);
            for (auto cell : tree.overlapping(tube))
                reach.emplace_back(cell, s);
            prev = next;
        }
        std::sort(reach.begin(), reach.end());

        double lip_all = b > a ? motion.speed_bound(a, b, cn) : 0.0;
        double prune_gap = 2 * radius + 4 * lip_all * params.contact_tol + slack;
        bool can_prune = params.prune_by_distance && std::holds_alternative<Ball3>(area);
        std::vector<PriorContact> prior;

        auto& out = per_area[i];
        for (std::size_t r = 0; r < reach.size();)
        {
            std::size_t cell = reach[r].first;
            std::vector<TimeInterval> found;
            while (r < reach.size() && reach[r].first == cell)
            {
                std::size_t s0 = reach[r].second, s1 = s0;
                ++r;
                while (r < reach.size() && reach[r].first == cell && reach[r].second == s1 + 1)
                {
                    ++s1;
                    ++r;
                }
                double w0 = a + (b - a) * double(s0) / double(segs);
                double w1 = s1 + 1 == segs ? b : a + (b - a) * double(s1 + 1) / double(segs);

                if (can_prune)
                {
                    bool skip = std::any_of(prior.begin(), prior.end(), [&](PriorContact const& p) {
                        return p.interval.t0 <= w0 && w1 <= p.interval.t1
                               && p.cell.distance(boxes[cell]) > prune_gap;
                    });
                    if (skip)
                    {
                        ++pruned[i];
                        continue;
                    }
                }
                ++solved[i];
                std::vector<TimeInterval> iv;
                if (auto const* ball = std::get_if<Ball3>(&area))
                    iv = contact_intervals_sphere(*ball, motion, boxes[cell], opt, w0, w1);
                else
                    iv = contact_intervals_box(std::get<Box3>(area), motion, boxes[cell], opt, w0,
                                               w1);
                found.insert(found.end(), iv.begin(), iv.end());
            }
            for (auto const& iv : merge_intervals(std::move(found), 2 * params.contact_tol))
            {
                TimeInterval clipped{std::max(a, iv.t0), std::min(b, iv.t1)};
                out.push_back({cell, {std::uint32_t(i), clipped.t0, clipped.t1}});
                if (can_prune)
                    prior.push_back({boxes[cell], clipped});
            }
        }
    });

    std::vector<SweptCell> cells(boxes.size());
    for (std::size_t j = 0; j < boxes.size(); ++j)
        cells[j].box = boxes[j];
    for (auto const& hits : per_area)
    {
        for (auto const& h : hits)
            cells[h.cell].entries.push_back(h.entry);
    }
    for (auto& c : cells)
    {
        std::sort(c.entries.begin(), c.entries.end(), [](CellEntry const& x, CellEntry const& y) {
            return x.patch < y.patch || (x.patch == y.patch && x.t0 < y.t0);
        });
    }

    if (stats)
    {
        stats->pairs_solved = 0;
        stats->pairs_pruned = 0;
        for (std::size_t i = 0; i < base.size(); ++i)
        {
            stats->pairs_solved += solved[i];
            stats->pairs_pruned += pruned[i];
        }
        stats->cost = partition_cost(cells, params.weight);
    }

    SweptVolumeRep rep;
    rep.bound = tree.bound();
    rep.tree = std::move(part.tree);
    rep.cells = std::move(cells);
    rep.base = base;
    rep.motion = motion;
    rep.params = params;
    if (stats)
        stats->partition = std::move(part);
    return rep;
}

SweptVolumeRep assemble_swept_rep(LocalImplicitRep base, RigidMotion motion, SweepParams params,
                                  CellTree tree, std::vector<SweptCell> cells)
{
    params.validate();
    base.validate();
    if (tree.leaf_count() != cells.size())
        throw InvalidInput("cell count does not match the split tree");
    for (auto const& n : tree.nodes())
    {
        if (n.axis >= 0)
            continue;
        auto const& c = cells[std::size_t(n.cell)];
        if ((c.box.min - n.box.min).cwiseAbs().maxCoeff() > 0
            || (c.box.max - n.box.max).cwiseAbs().maxCoeff() > 0)
            throw InvalidInput("cell box does not match its tree leaf");
    }
    for (auto const& c : cells)
    {
        for (auto const& e : c.entries)
        {
            if (e.patch >= base.size())
                throw InvalidInput("cell entry references a missing patch");
            if (!(e.t0 <= e.t1) || e.t0 < motion.lower() || e.t1 > motion.upper())
                throw InvalidInput("cell entry interval outside the motion domain");
        }
    }
    SweptVolumeRep rep;
    rep.bound = tree.bound();
    rep.tree = std::move(tree);
    rep.cells = std::move(cells);
    rep.base = std::move(base);
    rep.motion = std::move(motion);
    rep.params = std::move(params);
    return rep;
}

}  // namespace sweptvol
