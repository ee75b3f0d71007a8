#ifndef AHLP_PRESOLVE_ENGINE_HPP
#define AHLP_PRESOLVE_ENGINE_HPP

#include "ahlp/presolve/bound_tightening.hpp"
#include "ahlp/presolve/lin_dependencies.hpp"
#include "ahlp/presolve/model_cleanup.hpp"
#include "ahlp/presolve/parallel_rows.hpp"
#include "ahlp/presolve/permute.hpp"
#include "ahlp/presolve/singletons.hpp"
#include "ahlp/presolve/tiny_entries.hpp"
#include "ahlp/presolve/vars_fixation.hpp"

#include <chrono>
#include <functional>

namespace ahlp
{

/// Presolvers of one round, in call order.
inline const std::vector<Presolver>& round_schedule()
{
   static const std::vector<Presolver> s = { Presolver::ModelCleanup,    Presolver::SingletonRows,
                                             Presolver::SingletonCols,   Presolver::VarsFixation,
                                             Presolver::BoundTightening, Presolver::ParallelLocal,
                                             Presolver::ParallelLinking, Presolver::Permute };
   return s;
}

/// Whether another round is worth running after `rounds` completed rounds.
inline bool should_continue( std::int64_t reductions, std::int64_t size, int rounds, const PresolveConfig& cfg )
{
   return reductions > 0 && static_cast<Real>( reductions ) >= cfg.threshold * static_cast<Real>( size ) &&
          rounds < cfg.max_rounds;
}

/// Global ids of the reduced problem in monolithic order.
struct ReducedIds
{
   std::vector<std::int64_t> cols;
   std::vector<std::int64_t> rows; ///< equality rows first, then inequality rows
   Index num_eq = 0;
};

/// Global ids of one rank's reduced slice, grouped like the slice.
struct SliceIds
{
   std::vector<std::int64_t> zero_cols, zero_eq, zero_ineq, link_eq, link_ineq;
   std::vector<int> block_ids;
   std::vector<std::vector<std::int64_t>> block_cols, block_eq, block_ineq;
};

struct LinkingCounts
{
   std::int64_t rows = 0;
   std::int64_t cols = 0;
};

/// Alive linking rows, and x_0 columns with an entry in some local row
/// (0-link columns are not linking variables) (collective).
inline LinkingCounts linking_counts( const Workspace& ws, Communicator& comm )
{
   LinkingCounts lc;
   lc.rows = ws.count_alive( RowScope::Link );
   std::vector<std::uint8_t> used( ws.link_cols.size(), 0 );
   for( std::size_t j = 0; j < ws.link_cols.size(); ++j )
      if( ws.link_cols[j].alive )
         ws.for_col_entries( ColKey::link( static_cast<Index>( j ) ), [&]( RowKey r, Real ) {
            used[j] = used[j] || r.scope() == RowScope::Local;
         } );
   used = comm.allreduce( used, ops::logical_or(), "linking-counts:" + std::to_string( used.size() ) );
   for( auto u : used )
      lc.cols += u;
   return lc;
}

/// Rows + columns + entries of the alive problem (collective).
inline std::int64_t problem_size( const Workspace& ws, Communicator& comm )
{
   const bool root = ws.rank == 0;
   std::int64_t n = 0;
   ws.for_all_rows( [&]( RowKey r ) {
      const bool own_row = !r.replicated() || root;
      n += own_row;
      ws.for_row_entries( r, [&]( ColKey c, Real ) { n += !( r.replicated() && c.is_link() ) || root; } );
   } );
   for( const auto& c : ws.local_cols )
      n += c.alive;
   if( root )
      for( const auto& c : ws.link_cols )
         n += c.alive;
   return comm.allreduce( n, ops::sum<std::int64_t>(), "problem-size" );
}

/// Outcome of presolve on one rank. Global fields agree on all ranks.
struct RankPresolve
{
   PresolveStatus status = PresolveStatus::Ok;
   std::string message;
   BlockProblem slice;
   RankStack stack;
   SliceIds ids;
   ReductionCounters counters; ///< summed over ranks
   int rounds = 0;
   std::vector<std::string> violations;
   std::vector<std::pair<std::string, Real>> timings; ///< seconds per presolver call
};

namespace detail
{

   inline void take_snapshot( PresolveContext& ctx )
   {
      const auto& ws = ctx.ws;
      auto& st = ctx.stack;
      auto add_cols = [&]( bool local ) {
         const auto& cols = local ? ws.local_cols : ws.link_cols;
         for( const auto& c : cols )
            if( c.alive )
               st.snapshot_cols.push_back( { c.gid, c.lower, c.upper, c.cost, !local } );
      };
      add_cols( false );
      add_cols( true );
      ws.for_all_rows( [&]( RowKey r ) {
         const auto& row = ws.row( r );
         SnapRow s{ row.gid, r.replicated(), row.equality, row.lhs, row.rhs, {} };
         ws.for_row_entries( r, [&]( ColKey c, Real a ) { s.entries.push_back( { ws.col( c ).gid, a } ); } );
         st.snapshot_rows.push_back( std::move( s ) );
      } );
   }

   inline void record_final( PresolveContext& ctx )
   {
      const auto& ws = ctx.ws;
      auto& st = ctx.stack;
      for( const auto& c : ws.link_cols )
         if( c.alive )
            st.final_cols.push_back( { c.gid, c.cost, true } );
      for( const auto& c : ws.local_cols )
         if( c.alive )
            st.final_cols.push_back( { c.gid, c.cost, false } );
      ws.for_all_rows( [&]( RowKey r ) { st.final_rows.push_back( { ws.row( r ).gid, r.replicated() } ); } );
   }

   inline SliceIds slice_ids( const Workspace& ws, const ExtractionMap& m )
   {
      SliceIds ids;
      auto cols = [&]( const std::vector<ColKey>& ks ) {
         std::vector<std::int64_t> out;
         for( auto k : ks )
            out.push_back( ws.col( k ).gid );
         return out;
      };
      auto rows = [&]( const std::vector<RowKey>& ks ) {
         std::vector<std::int64_t> out;
         for( auto k : ks )
            out.push_back( ws.row( k ).gid );
         return out;
      };
      ids.zero_cols = cols( m.zero_cols );
      ids.zero_eq = rows( m.zero_eq );
      ids.zero_ineq = rows( m.zero_ineq );
      ids.link_eq = rows( m.link_eq );
      ids.link_ineq = rows( m.link_ineq );
      ids.block_ids = m.block_ids;
      for( std::size_t s = 0; s < m.block_ids.size(); ++s )
      {
         ids.block_cols.push_back( cols( m.block_cols[s] ) );
         ids.block_eq.push_back( rows( m.block_eq[s] ) );
         ids.block_ineq.push_back( rows( m.block_ineq[s] ) );
      }
      return ids;
   }

   inline void call_presolver( PresolveContext& ctx, Presolver p )
   {
      switch( p )
      {
      case Presolver::TinyEntries: tiny_entries( ctx ); break;
      case Presolver::ModelCleanup: model_cleanup( ctx ); break;
      case Presolver::SingletonRows: singleton_rows( ctx ); break;
      case Presolver::SingletonCols: singleton_cols( ctx ); break;
      case Presolver::VarsFixation: vars_fixation( ctx ); break;
      case Presolver::BoundTightening: bound_tightening( ctx ); break;
      case Presolver::ParallelLocal: parallel_rows_local( ctx ); break;
      case Presolver::ParallelLinking: parallel_rows_linking( ctx ); break;
      case Presolver::Permute: permute( ctx ); break;
      case Presolver::LinDependencies: lin_dependencies( ctx ); break;
      case Presolver::Count: break;
      }
   }

} // namespace detail

/// Presolve of one rank's slice (collective over `comm`).
inline RankPresolve presolve_rank( const BlockProblem& slice, const PresolveConfig& cfg, Communicator& comm )
{
   cfg.check();
   if( auto errs = validate_arrowhead( slice, comm ); !errs.empty() )
      throw InvalidProblem( "presolve input is not in arrowhead form: " + errs.front() );
   const GidLayout layout = gid_layout( slice, comm );

   PresolveContext ctx;
   ctx.cfg = cfg;
   ctx.comm = &comm;
   ctx.ws = make_workspace( slice, comm.rank(), comm.size(), layout );
   ctx.tracking = Tracking::compute_from_scratch( ctx.ws, comm );
   ctx.stack.rank = comm.rank();
   ctx.stack.nranks = comm.size();
   ctx.stack.num_cols = layout.num_cols;
   ctx.stack.num_eq = layout.num_eq;
   ctx.stack.num_ineq = layout.num_ineq;

   RankPresolve out;
   auto run = [&]( Presolver p ) {
      if( ctx.failed() || !cfg.enabled( p ) )
         return;
      LinkingCounts before;
      if( cfg.validate_each_step )
         before = linking_counts( ctx.ws, comm );
      ctx.current = p;
      const auto t0 = std::chrono::steady_clock::now();
      detail::call_presolver( ctx, p );
      ctx.sync();
      out.timings.push_back(
          { to_string( p ), std::chrono::duration<Real>( std::chrono::steady_clock::now() - t0 ).count() } );

      const auto code = comm.allreduce( static_cast<int>( ctx.status ), ops::max<int>(), "status" );
      if( code != 0 )
      {
         std::string msg;
         for( const auto& m : comm.allgather( std::vector<std::string>{ ctx.message }, "status-message" ) )
            if( msg.empty() && !m.empty() )
               msg = m;
         ctx.status = static_cast<PresolveStatus>( code );
         ctx.message = msg;
         return;
      }
      if( cfg.validate_each_step )
      {
         const std::string where = std::string( "after " ) + to_string( p ) + ": ";
         for( const auto& e : validate_arrowhead( extract_slice( ctx.ws ), comm ) )
            out.violations.push_back( where + e );
         const auto after = linking_counts( ctx.ws, comm );
         if( after.rows > before.rows )
            out.violations.push_back( where + "linking rows grew from " + std::to_string( before.rows ) + " to " +
                                      std::to_string( after.rows ) );
         if( after.cols > before.cols )
            out.violations.push_back( where + "linking columns grew from " + std::to_string( before.cols ) +
                                      " to " + std::to_string( after.cols ) );
      }
   };

   run( Presolver::TinyEntries );
   detail::take_snapshot( ctx );
   while( !ctx.failed() && out.rounds < cfg.max_rounds )
   {
      const std::int64_t size = problem_size( ctx.ws, comm );
      const auto start = ctx.counters.global( comm, "round-counters" ).total().reductions();
      for( Presolver p : round_schedule() )
         run( p );
      ctx.ws.compact();
      ctx.sync();
      ++out.rounds;
      const auto done = ctx.counters.global( comm, "round-counters" ).total().reductions() - start;
      if( !should_continue( done, size, out.rounds, cfg ) )
         break;
   }
   run( Presolver::LinDependencies );
   ctx.ws.compact();

   detail::record_final( ctx );
   ExtractionMap map;
   out.slice = extract_slice( ctx.ws, &map );
   out.ids = detail::slice_ids( ctx.ws, map );
   out.status = ctx.status;
   out.message = ctx.message;
   out.counters = ctx.counters.global( comm, "final-counters" );
   out.stack = std::move( ctx.stack );
   return out;
}

/// Result of a distributed presolve run.
struct PresolveRun
{
   PresolveStatus status = PresolveStatus::Ok;
   std::string message;
   BlockProblem reduced;
   ReducedIds ids;
   std::vector<RankStack> stacks;
   ReductionCounters counters;
   int rounds = 0;
   int nranks = 1;
   SizeCounts original, reduced_size;
   std::vector<std::string> violations;
   std::vector<std::pair<std::string, Real>> timings; ///< rank 0, per presolver call
   Real seconds = 0;

   MonolithicLP reduced_lp() const { return assemble_monolithic( reduced ).first; }
};

inline ReducedIds reduced_ids( const std::vector<SliceIds>& parts )
{
   struct Blk
   {
      int id;
      const std::vector<std::int64_t> *cols, *eq, *ineq;
   };
   std::vector<Blk> blocks;
   for( const auto& p : parts )
      for( std::size_t s = 0; s < p.block_ids.size(); ++s )
         blocks.push_back( { p.block_ids[s], &p.block_cols[s], &p.block_eq[s], &p.block_ineq[s] } );
   std::sort( blocks.begin(), blocks.end(), []( const Blk& a, const Blk& b ) { return a.id < b.id; } );
   ReducedIds ids;
   const auto& z = parts.front();
   auto cat = []( std::vector<std::int64_t>& out, const std::vector<std::int64_t>& in ) {
      out.insert( out.end(), in.begin(), in.end() );
   };
   cat( ids.cols, z.zero_cols );
   for( const auto& b : blocks )
      cat( ids.cols, *b.cols );
   cat( ids.rows, z.zero_eq );
   for( const auto& b : blocks )
      cat( ids.rows, *b.eq );
   cat( ids.rows, z.link_eq );
   ids.num_eq = static_cast<Index>( ids.rows.size() );
   cat( ids.rows, z.zero_ineq );
   for( const auto& b : blocks )
      cat( ids.rows, *b.ineq );
   cat( ids.rows, z.link_ineq );
   return ids;
}

/// Distributes `full` over `nranks` ranks, presolves, and gathers the result.
inline PresolveRun presolve( const BlockProblem& full, const PresolveConfig& cfg, int nranks = 1,
                             ExecMode mode = ExecMode::Lockstep )
{
   const auto t0 = std::chrono::steady_clock::now();
   auto slices = distribute( full, nranks );
   std::vector<RankPresolve> res( nranks );
   run_ranks( nranks, mode, [&]( Communicator& comm ) { res[comm.rank()] = presolve_rank( slices[comm.rank()], cfg, comm ); } );

   PresolveRun run;
   run.nranks = nranks;
   run.status = res[0].status;
   run.message = res[0].message;
   run.counters = res[0].counters;
   run.rounds = res[0].rounds;
   run.timings = res[0].timings;
   std::vector<BlockProblem> reduced;
   std::vector<SliceIds> ids;
   for( auto& r : res )
   {
      run.violations.insert( run.violations.end(), r.violations.begin(), r.violations.end() );
      reduced.push_back( std::move( r.slice ) );
      ids.push_back( std::move( r.ids ) );
      run.stacks.push_back( std::move( r.stack ) );
   }
   std::sort( run.violations.begin(), run.violations.end() );
   run.violations.erase( std::unique( run.violations.begin(), run.violations.end() ), run.violations.end() );
   run.reduced = gather( reduced );
   run.ids = reduced_ids( ids );
   run.original = nnz_counts( full );
   run.reduced_size = nnz_counts( run.reduced );
   run.seconds = std::chrono::duration<Real>( std::chrono::steady_clock::now() - t0 ).count();
   return run;
}

} // namespace ahlp

#endif
