#ifndef AHLP_PRESOLVE_CONTEXT_HPP
#define AHLP_PRESOLVE_CONTEXT_HPP

#include "ahlp/comm/communicator.hpp"
#include "ahlp/postsolve/stack.hpp"
#include "ahlp/presolve/workspace.hpp"
#include "ahlp/tracking/tracking.hpp"

#include <array>
#include <set>
#include <string>
#include <vector>

namespace ahlp
{

enum class Presolver
{
   TinyEntries,
   ModelCleanup,
   SingletonRows,
   SingletonCols,
   VarsFixation,
   BoundTightening,
   ParallelLocal,
   ParallelLinking,
   Permute,
   LinDependencies,
   Count
};

inline constexpr std::size_t kNumPresolvers = static_cast<std::size_t>( Presolver::Count );

inline const char* to_string( Presolver p )
{
   static constexpr const char* names[] = { "tiny_entries",    "model_cleanup",    "singleton_rows", "singleton_cols",
                                            "vars_fixation",   "bound_tightening", "parallel_local", "parallel_linking",
                                            "permute",         "lin_dependencies" };
   return names[static_cast<std::size_t>( p )];
}

inline Presolver presolver_from_string( const std::string& s )
{
   for( std::size_t k = 0; k < kNumPresolvers; ++k )
      if( s == to_string( static_cast<Presolver>( k ) ) )
         return static_cast<Presolver>( k );
   throw std::invalid_argument( "unknown presolver '" + s + "'" );
}

struct PresolveConfig
{
   int max_rounds = 10;
   Real threshold = 1e-4; ///< continue while reductions >= threshold * size
   Real feastol = 1e-6;
   Real tiny_tol = 1e-10;
   Real parallel_tol = 1e-10;
   Real zero_pivot_tol = 1e-10;
   Real pivot_threshold = 0.1;
   std::set<Presolver> disabled;
   bool validate_each_step = false;

   bool enabled( Presolver p ) const { return !disabled.count( p ); }

   void check() const
   {
      for( Real t : { feastol, tiny_tol, parallel_tol, zero_pivot_tol, pivot_threshold } )
         if( !( t > 0 ) )
            throw std::invalid_argument( "tolerances must be positive" );
      if( !( threshold > 0 && threshold < 1 ) )
         throw std::invalid_argument( "continuation threshold must lie in (0, 1)" );
      if( max_rounds < 0 )
         throw std::invalid_argument( "max rounds must be nonnegative" );
      if( pivot_threshold > 1 )
         throw std::invalid_argument( "pivot threshold must lie in (0, 1]" );
   }
};

struct Tally
{
   std::int64_t rows_deleted = 0;
   std::int64_t cols_deleted = 0;
   std::int64_t entries_deleted = 0;
   std::int64_t bounds_tightened = 0;
   std::int64_t vars_fixed = 0;
   std::int64_t rows_moved = 0;
   std::int64_t cols_moved = 0;

   std::int64_t reductions() const { return rows_deleted + cols_deleted + entries_deleted + bounds_tightened; }

   std::array<std::int64_t, 7> as_array() const
   {
      return { rows_deleted, cols_deleted, entries_deleted, bounds_tightened, vars_fixed, rows_moved, cols_moved };
   }
   static Tally from_array( const std::int64_t* a )
   {
      return { a[0], a[1], a[2], a[3], a[4], a[5], a[6] };
   }
   Tally& operator+=( const Tally& o )
   {
      auto a = as_array(), b = o.as_array();
      for( std::size_t k = 0; k < a.size(); ++k )
         a[k] += b[k];
      return *this = from_array( a.data() );
   }
   bool operator==( const Tally& ) const = default;
};

struct ReductionCounters
{
   std::array<Tally, kNumPresolvers> by_presolver{};

   Tally& operator[]( Presolver p ) { return by_presolver[static_cast<std::size_t>( p )]; }
   const Tally& operator[]( Presolver p ) const { return by_presolver[static_cast<std::size_t>( p )]; }

   Tally total() const
   {
      Tally t;
      for( const auto& x : by_presolver )
         t += x;
      return t;
   }

   /// Sums the per-rank tallies (collective).
   ReductionCounters global( Communicator& comm, const std::string& tag ) const
   {
      std::vector<std::int64_t> flat;
      for( const auto& t : by_presolver )
         for( auto v : t.as_array() )
            flat.push_back( v );
      flat = comm.allreduce( flat, ops::sum<std::int64_t>(), tag );
      ReductionCounters out;
      for( std::size_t k = 0; k < kNumPresolvers; ++k )
         out.by_presolver[k] = Tally::from_array( flat.data() + 7 * k );
      return out;
   }
   bool operator==( const ReductionCounters& ) const = default;
};

enum class PresolveStatus
{
   Ok = 0,
   Unbounded = 1,
   Infeasible = 2
};

inline const char* to_string( PresolveStatus s )
{
   return s == PresolveStatus::Ok ? "ok" : s == PresolveStatus::Infeasible ? "infeasible" : "unbounded";
}

/// Per-rank state shared by all presolvers.
struct PresolveContext
{
   Workspace ws;
   Tracking tracking;
   RankStack stack;
   PresolveConfig cfg;
   Communicator* comm = nullptr;
   ReductionCounters counters;
   Presolver current = Presolver::TinyEntries;
   PresolveStatus status = PresolveStatus::Ok;
   std::string message;

   bool root() const { return ws.rank == 0; }
   bool failed() const { return status != PresolveStatus::Ok; }
   Tally& tally() { return counters[current]; }

   /// Counts an operation; replicated operations are counted by rank 0 only.
   Tally* count( bool replicated ) { return replicated && !root() ? nullptr : &tally(); }

   void fail( PresolveStatus s, const std::string& why )
   {
      if( failed() )
         return;
      status = s;
      message = std::string( to_string( current ) ) + ": " + why;
   }

   bool replicated( RowKey r ) const { return r.replicated(); }

   /// Tightens the bounds of `c` to [nl, nu]; both must lie inside the
   /// current bounds.
   void set_bounds( ColKey c, Real nl, Real nu )
   {
      auto& col = ws.col( c );
      tracking.on_bound_change( ws, c, col.lower, col.upper, nl, nu );
      col.lower = nl;
      col.upper = nu;
   }

   void remove_row( RowKey r )
   {
      tracking.on_row_removed( ws, r );
      ws.row( r ).alive = false;
      if( auto* t = count( r.replicated() ) )
         t->rows_deleted += 1;
   }

   /// Removes column `c` at `value`: row sides are shifted by a * value and
   /// the objective constant absorbs cost * value.
   void fix_and_remove_col( ColKey c, Real value )
   {
      auto& col = ws.col( c );
      ws.for_col_entries( c, [&]( RowKey r, Real a ) {
         const Real d = a * value;
         if( d == 0 )
            return;
         if( r.scope() == RowScope::Link && c.is_local() )
         {
            tracking.shift_link_row( r.index(), d );
            return;
         }
         auto& row = ws.row( r );
         if( is_finite( row.lhs ) )
            row.lhs -= d;
         if( row.equality )
            row.rhs = row.lhs;
         else if( is_finite( row.rhs ) )
            row.rhs -= d;
      } );
      if( col.cost != 0 )
         ( c.is_link() ? ws.offset_replicated : ws.offset_local ) += col.cost * value;
      tracking.on_col_removed( ws, c );
      col.alive = false;
      if( auto* t = count( c.is_link() ) )
      {
         t->cols_deleted += 1;
         t->vars_fixed += 1;
      }
   }

   /// Pushes a fixation record and removes the column.
   void fix_col( ColKey c, Real value )
   {
      const auto& col = ws.col( c );
      stack.push( FixedVar{ col.gid, value, col.cost, c.is_link() } );
      fix_and_remove_col( c, value );
   }

   /// Synchronizes linking data and records the synchronization (collective).
   void sync()
   {
      tracking.sync_linking( ws, *comm );
      stack.push( SyncEvent{ Tracking::layout_tag( ws ) } );
   }
};

/// Value inside [l, u] closest to zero.
inline Real clamp_zero( Real l, Real u ) { return l > 0 ? l : u < 0 ? u : 0.0; }

} // namespace ahlp

#endif
