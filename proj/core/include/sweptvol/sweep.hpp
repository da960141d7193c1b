#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "contact.hpp"
#include "motion.hpp"
#include "representation.hpp"
#include "solvers.hpp"

namespace sweptvol {

//---------------------------------------------------------------------------//
/*!
 * Scalar weight on a regular grid with trilinear interpolation, clamped
 * outside the grid bounds. Samples are x-fastest.
 */
struct WeightGrid
{
    Box3 bounds;
    std::array<std::uint32_t, 3> dims{2, 2, 2};
    std::vector<double> values;

    //! Throws InvalidInput on size mismatch, dims < 2, or negative / non-finite samples.
    void validate() const;
    double operator()(Vec3 const& p) const;
    //! Exact integral of the interpolant over a box.
    double integral(Box3 const& box) const;
};

struct SweepParams
{
    int time_samples = 128;       //!< snapshot count M_t
    double contact_tol = 1e-7;
    bool fast_mode = false;
    std::optional<WeightGrid> weight;
    std::size_t max_cells = 65536;
    bool seed_splits_along_path = false;
    bool prune_by_distance = false;
    double empty_split_fraction = 0.01;  //!< of Bound's surface area

    void validate() const;
};

struct CellEntry
{
    std::uint32_t patch = 0;
    double t0 = 0.0;
    double t1 = 0.0;
};

struct SweptCell
{
    Box3 box;
    std::vector<CellEntry> entries;
};

//! Node of the axis-aligned split tree; a leaf when axis < 0.
struct SplitNode
{
    Box3 box;
    int axis = -1;
    double position = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t cell = -1;
    int depth = 0;
};

struct LocateResult
{
    std::optional<std::size_t> cell;
    int visits = 0;
};

struct RayCell
{
    std::size_t cell;
    double s0, s1;
};

//! Split tree over a box; leaves index into a cell list.
class CellTree
{
  public:
    CellTree() = default;
    explicit CellTree(Box3 const& bound);

    Box3 const& bound() const { return nodes_.front().box; }
    std::vector<SplitNode> const& nodes() const { return nodes_; }
    std::size_t leaf_count() const { return leaves_; }
    int depth() const;

    //! Split leaf node `node` at `position` along `axis`; returns the two new nodes.
    std::pair<std::int32_t, std::int32_t> split(std::int32_t node, int axis, double position);

    /*!
     * Assign consecutive cell indices to leaves in depth-first order
     * (left before right). Must be called after the last split.
     */
    std::vector<Box3> finalize();

    //! Leaf containing p; ties on a split plane go to the lower side.
    LocateResult locate(Vec3 const& p) const;
    //! Cells whose box intersects b, ascending.
    std::vector<std::size_t> overlapping(Box3 const& b) const;
    //! Cells crossed by the ray, sorted by entry parameter.
    std::vector<RayCell> along_ray(Ray const& ray) const;

    static CellTree from_nodes(std::vector<SplitNode> nodes);

  private:
    std::vector<SplitNode> nodes_;
    std::size_t leaves_ = 0;
};

//---------------------------------------------------------------------------//

struct SweptVolumeRep
{
    Box3 bound;
    CellTree tree;
    std::vector<SweptCell> cells;
    LocalImplicitRep base;
    RigidMotion motion;
    SweepParams params;

    LocateResult locate(Vec3 const& p) const { return tree.locate(p); }
};

/*!
 * Axis-aligned box containing every placement of the base: the bounding
 * sphere (radius r, centre c) moves to M(t) c + v(t), so each coordinate
 * lies within [min v - (r + |c|), max v + (r + |c|)].
 */
Box3 bounding_box_swept(LocalImplicitRep const& base, RigidMotion const& motion);

//! Partition cost log M + mean of measure * |A_j| * tau_j, tau_j the summed entry durations.
double partition_cost(std::vector<SweptCell> const& cells,
                      std::optional<WeightGrid> const& weight = std::nullopt);

struct PartitionResult
{
    CellTree tree;
    std::vector<Box3> cells;
    //! Snapshot boxes meeting each cell.
    std::vector<std::size_t> snapshot_hits;
    //! Snapshot cost after each accepted cost-driven split, starting with C_1.
    std::vector<double> cost_history;
    std::size_t snapshot_total = 0;
    std::size_t empty_splits = 0;
    std::size_t seed_splits = 0;
};

/*!
 * Cost-driven partition of the swept bounding box using M_t snapshots of
 * the moved areas, followed by a pass splitting empty slabs off boundary
 * cells. Keeps every leaf depth within ceil(log2(#cells)).
 */
PartitionResult partition_cells(LocalImplicitRep const& base, RigidMotion const& motion,
                                SweepParams const& params);

struct SweepStats
{
    PartitionResult partition;
    std::size_t pairs_solved = 0;
    std::size_t pairs_pruned = 0;
    double cost = 0.0;  //!< exact-entry cost of the final cells
};

SweptVolumeRep build_swept_rep(LocalImplicitRep const& base, RigidMotion const& motion,
                               SweepParams const& params, SweepStats* stats = nullptr);

/*!
 * Assemble a swept representation from a saved cell tree and entries,
 * checking that entries reference valid patches and lie inside [a, b].
 */
SweptVolumeRep assemble_swept_rep(LocalImplicitRep base, RigidMotion motion, SweepParams params,
                                  CellTree tree, std::vector<SweptCell> cells);

}  // namespace sweptvol
