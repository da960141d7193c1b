#include "sweptvol/representation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sweptvol {

namespace {
template<class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

bool area_contains(Area const& a, Vec3 const& p)
{
    return std::visit([&](auto const& s) { return s.contains(p); }, a);
}

Box3 area_bounding_box(Area const& a)
{
    return std::visit(overloaded{[](Box3 const& b) { return b; },
                                 [](Ball3 const& b) { return b.bounding_box(); }},
                      a);
}

Vec3 area_centre(Area const& a)
{
    return std::visit(overloaded{[](Box3 const& b) { return b.center(); },
                                 [](Ball3 const& b) { return b.centre; }},
                      a);
}

double area_radius(Area const& a)
{
    return std::visit(overloaded{[](Box3 const& b) { return 0.5 * b.diagonal(); },
                                 [](Ball3 const& b) { return b.radius; }},
                      a);
}

double area_distance(Area const& a, Vec3 const& p)
{
    return std::visit(
        overloaded{[&](Box3 const& b) { return b.distance(p); },
                   [&](Ball3 const& b) {
                       return std::max(0.0, (p - b.centre).norm() - b.radius);
                   }},
        a);
}

void LocalImplicitRep::validate() const
{
    for (auto const& patch : patches)
    {
        bool is_box = std::holds_alternative<Box3>(patch.area);
        if (kind == RepKind::OctreeBased && !is_box)
            throw InvalidInput("octree-based representation must use box areas");
        if (kind == RepKind::BallCover && is_box)
            throw InvalidInput("ball-cover representation must use ball areas");
        Box3 ab = area_bounding_box(patch.area);
        // Small relative slack for unscaled coordinates.
        double slack = 1e-9 * std::max(1.0, bound.diagonal());
        if (!bound.inflated(slack).contains(ab.min) || !bound.inflated(slack).contains(ab.max))
            throw InvalidInput("representation bound does not contain every area");
    }
}

Box3 areas_bounding_box(std::vector<LocalPatch> const& patches)
{
    Box3 b = Box3::empty();
    for (auto const& p : patches)
        b.expand(area_bounding_box(p.area));
    return b;
}

Ball3 bounding_sphere(LocalImplicitRep const& rep)
{
    if (rep.patches.empty())
        throw InvalidInput("bounding_sphere: empty representation");
    Vec3 c = Vec3::Zero();
    for (auto const& p : rep.patches)
        c += area_centre(p.area);
    c /= static_cast<double>(rep.patches.size());
    double r = 0.0;
    for (auto const& p : rep.patches)
        r = std::max(r, (area_centre(p.area) - c).norm() + area_radius(p.area));
    Ball3 b;
    b.centre = c;
    b.radius = r > 0 ? r : 1e-12;
    return b;
}

//---------------------------------------------------------------------------//

AreaIndex::AreaIndex(std::vector<LocalPatch> const& patches) : patches_(&patches)
{
    boxes_.reserve(patches.size());
    for (auto const& p : patches)
        boxes_.push_back(area_bounding_box(p.area));
    order_.resize(patches.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (!patches.empty())
        build(0, static_cast<std::uint32_t>(patches.size()));
}

std::int32_t AreaIndex::build(std::uint32_t begin, std::uint32_t end)
{
    auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{});
    Box3 box = Box3::empty();
    for (auto i = begin; i < end; ++i)
        box.expand(boxes_[order_[i]]);
    nodes_[id].box = box;
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= 4)
        return id;

    int axis = 0;
    box.extents().maxCoeff(&axis);
    auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return boxes_[a].center()[axis] < boxes_[b].center()[axis];
                     });
    std::int32_t l = build(begin, mid);
    std::int32_t r = build(mid, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

void AreaIndex::for_each_containing(Vec3 const& p,
                                    std::function<void(std::size_t)> const& fn) const
{
    for (auto i : containing(p))
        fn(i);
}

std::vector<std::size_t> AreaIndex::containing(Vec3 const& p) const
{
    std::vector<std::size_t> out;
    if (nodes_.empty())
        return out;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty())
    {
        Node const& n = nodes_[stack.back()];
        stack.pop_back();
        if (!n.box.contains(p))
            continue;
        if (n.left < 0)
        {
            for (auto i = n.begin; i < n.end; ++i)
            {
                auto idx = order_[i];
                if (area_contains((*patches_)[idx].area, p))
                    out.push_back(idx);
            }
            continue;
        }
        stack.push_back(n.left);
        stack.push_back(n.right);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> AreaIndex::ray_candidates(Ray const& ray) const
{
    std::vector<std::size_t> out;
    if (nodes_.empty())
        return out;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty())
    {
        Node const& n = nodes_[stack.back()];
        stack.pop_back();
        if (!clip_ray(ray, n.box))
            continue;
        if (n.left < 0)
        {
            for (auto i = n.begin; i < n.end; ++i)
            {
                if (clip_ray(ray, boxes_[order_[i]]))
                    out.push_back(order_[i]);
            }
            continue;
        }
        stack.push_back(n.left);
        stack.push_back(n.right);
    }
    std::sort(out.begin(), out.end());
    return out;
}

//---------------------------------------------------------------------------//

RepEvaluator::RepEvaluator(LocalImplicitRep const& rep) : rep_(&rep), index_(rep.patches)
{
}

double RepEvaluator::value(Vec3 const& p) const
{
    double best = std::numeric_limits<double>::infinity();
    for (auto i : index_.containing(p))
        best = std::min(best, eval_procedure(rep_->patches[i].procedure, p));
    return best;
}

}  // namespace sweptvol
