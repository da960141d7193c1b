#include "sweptvol/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

namespace sweptvol {

namespace {
constexpr std::uint32_t leaf_size = 8;

bool neighbor_less(KdTree::Neighbor const& a, KdTree::Neighbor const& b)
{
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
}
}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points))
{
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (!points_.empty())
    {
        nodes_.reserve(2 * points_.size() / leaf_size + 2);
        build(0, static_cast<std::uint32_t>(points_.size()));
    }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end)
{
    auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size)
        return id;

    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (auto i = begin; i < end; ++i)
    {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis])
        return id;  // all coincident: keep as a leaf

    auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return points_[a][axis] < points_[b][axis];
                     });
    double split = points_[order_[mid]][axis];

    std::int32_t l = build(begin, mid);
    std::int32_t r = build(mid, end);
    Node& n = nodes_[id];
    n.axis = axis;
    n.split = split;
    n.left = l;
    n.right = r;
    return id;
}

template<class Visit>
void KdTree::visit_ball(Vec3 const& q, double r2, Visit&& visit) const
{
    if (nodes_.empty())
        return;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty())
    {
        Node const& n = nodes_[stack.back()];
        stack.pop_back();
        if (n.axis < 0)
        {
            for (auto i = n.begin; i < n.end; ++i)
            {
                auto idx = order_[i];
                double d2 = (points_[idx] - q).squaredNorm();
                if (d2 <= r2)
                    visit(idx, d2);
            }
            continue;
        }
        double diff = q[n.axis] - n.split;
        // left holds coordinates <= split, right holds >= split
        if (diff <= 0 || diff * diff <= r2)
            stack.push_back(n.left);
        if (diff >= 0 || diff * diff <= r2)
            stack.push_back(n.right);
    }
}

std::vector<std::uint32_t> KdTree::radius_search(Vec3 const& q, double r) const
{
    std::vector<std::uint32_t> out;
    visit_ball(q, r * r, [&](std::uint32_t i, double) { out.push_back(i); });
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t KdTree::count_within(Vec3 const& q, double r) const
{
    std::size_t n = 0;
    visit_ball(q, r * r, [&](std::uint32_t, double) { ++n; });
    return n;
}

std::vector<KdTree::Neighbor> KdTree::knn(Vec3 const& q, std::size_t k,
                                          std::int64_t skip) const
{
    std::vector<Neighbor> heap;  // max-heap on neighbor_less
    if (k == 0 || nodes_.empty())
        return heap;
    heap.reserve(k + 1);

    auto worst = [&]() {
        return heap.size() < k ? std::numeric_limits<double>::infinity()
                               : heap.front().dist2;
    };

    // Depth-first with nearer child first.
    std::vector<std::pair<std::int32_t, double>> stack{{0, 0.0}};
    while (!stack.empty())
    {
        auto [id, bound] = stack.back();
        stack.pop_back();
        if (bound > worst())
            continue;
        Node const& n = nodes_[id];
        if (n.axis < 0)
        {
            for (auto i = n.begin; i < n.end; ++i)
            {
                auto idx = order_[i];
                if (static_cast<std::int64_t>(idx) == skip)
                    continue;
                Neighbor cand{idx, (points_[idx] - q).squaredNorm()};
                if (heap.size() < k)
                {
                    heap.push_back(cand);
                    std::push_heap(heap.begin(), heap.end(), neighbor_less);
                }
                else if (neighbor_less(cand, heap.front()))
                {
                    std::pop_heap(heap.begin(), heap.end(), neighbor_less);
                    heap.back() = cand;
                    std::push_heap(heap.begin(), heap.end(), neighbor_less);
                }
            }
            continue;
        }
        double diff = q[n.axis] - n.split;
        std::int32_t near = diff <= 0 ? n.left : n.right;
        std::int32_t far = diff <= 0 ? n.right : n.left;
        stack.push_back({far, std::max(bound, diff * diff)});
        stack.push_back({near, bound});
    }
    std::sort_heap(heap.begin(), heap.end(), neighbor_less);
    return heap;
}

std::uint32_t KdTree::nearest(Vec3 const& q) const
{
    auto nn = knn(q, 1);
    if (nn.empty())
        throw InvalidInput("KdTree::nearest on empty tree");
    return nn.front().index;
}

}  // namespace sweptvol
