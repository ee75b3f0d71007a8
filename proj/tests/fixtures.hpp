#ifndef AHLP_TESTS_FIXTURES_HPP
#define AHLP_TESTS_FIXTURES_HPP

#include "ahlp/model/block_problem.hpp"
#include "ahlp/oracle/simplex.hpp"
#include "ahlp/postsolve/postsolve.hpp"
#include "ahlp/presolve/engine.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ahlp::test
{

/// Two blocks with one local column and one local equality row each, one
/// linking column, one linking equality row:
///   b1_r: x0 + x1 = 2, b2_r: x0 + 2 x2 = 3, l_r: x1 + x2 = 1.5, x in [0, 5].
inline BlockProblem two_block_problem()
{
   BlockProblem p;
   p.num_blocks = 2;
   p.zero.vars.push( 0, 5, 1, "x0" );
   p.zero.A0 = SparseMatrix( 0, 1 );
   p.zero.C0 = SparseMatrix( 0, 1 );
   p.zero.F0 = SparseMatrix::from_triplets( 1, 1, {} );
   p.zero.G0 = SparseMatrix( 0, 1 );
   p.zero.link_eq.rhs = { 1.5 };
   p.zero.link_eq.names = { "l_r" };
   for( int b = 1; b <= 2; ++b )
   {
      LocalBlock blk;
      blk.id = b;
      blk.vars.push( 0, 5, 1, "x" + std::to_string( b ) );
      blk.A = SparseMatrix::from_triplets( 1, 1, { { 0, 0, 1.0 } } );
      blk.B = SparseMatrix::from_triplets( 1, 1, { { 0, 0, Real( b ) } } );
      blk.C = SparseMatrix( 0, 1 );
      blk.D = SparseMatrix( 0, 1 );
      blk.F = SparseMatrix::from_triplets( 1, 1, { { 0, 0, 1.0 } } );
      blk.G = SparseMatrix( 0, 1 );
      blk.eq.rhs = { Real( b + 1 ) };
      blk.eq.names = { "b" + std::to_string( b ) + "_r" };
      p.blocks.push_back( blk );
   }
   return p;
}


/// Builds a monolithic LP together with its block assignment. Owners: 0 for
/// linking columns / A_0 and C_0 rows, i > 0 for block i, kLinkOwner for
/// linking rows.
class LpBuilder
{
 public:
   explicit LpBuilder( int blocks ) { a_.num_blocks = blocks; }

   Index col( Real l, Real u, Real c, int owner, std::string name = {} )
   {
      const Index j = lp_.ncols();
      lp_.l.push_back( l );
      lp_.u.push_back( u );
      lp_.c.push_back( c );
      lp_.col_names.push_back( name.empty() ? "x" + std::to_string( j ) : name );
      a_.col_owner.push_back( owner );
      return j;
   }

   void eq( std::map<Index, Real> row, Real b, int owner, std::string name = {} )
   {
      add( eq_, row );
      lp_.b.push_back( b );
      lp_.eq_names.push_back( name.empty() ? "e" + std::to_string( lp_.b.size() - 1 ) : name );
      a_.eq_owner.push_back( owner );
   }

   void ineq( std::map<Index, Real> row, Real d, Real f, int owner, std::string name = {} )
   {
      add( ineq_, row );
      lp_.d.push_back( d );
      lp_.f.push_back( f );
      lp_.ineq_names.push_back( name.empty() ? "g" + std::to_string( lp_.d.size() - 1 ) : name );
      a_.ineq_owner.push_back( owner );
   }

   MonolithicLP lp() const
   {
      MonolithicLP out = lp_;
      out.A = SparseMatrix::from_triplets( lp_.neq(), lp_.ncols(), triplets( eq_ ) );
      out.C = SparseMatrix::from_triplets( lp_.nineq(), lp_.ncols(), triplets( ineq_ ) );
      return out;
   }

   BlockAssignment assignment() const
   {
      BlockAssignment a = a_;
      number_assignment( a );
      return a;
   }

   BlockProblem problem() const { return split( lp(), assignment() ); }

 private:
   MonolithicLP lp_;
   BlockAssignment a_;
   std::vector<std::map<Index, Real>> eq_, ineq_;

   static void add( std::vector<std::map<Index, Real>>& rows, const std::map<Index, Real>& row ) { rows.push_back( row ); }

   static std::vector<Triplet> triplets( const std::vector<std::map<Index, Real>>& rows )
   {
      std::vector<Triplet> t;
      for( std::size_t i = 0; i < rows.size(); ++i )
         for( const auto& [j, v] : rows[i] )
            t.push_back( { Index( i ), j, v } );
      return t;
   }
};

/// Result of running single presolvers on every rank of a distributed problem.
struct StepResult
{
   PresolveStatus status = PresolveStatus::Ok;
   BlockProblem problem;
   ReductionCounters counters;
   std::vector<RankStack> stacks;

   MonolithicLP lp() const { return assemble_monolithic( problem ).first; }
};

/// Distributes `p` over `nranks`, runs `body` on each rank's context, syncs
/// and gathers the slices back.
inline StepResult run_steps( const BlockProblem& p, int nranks, const std::function<void( PresolveContext& )>& body,
                             PresolveConfig cfg = {} )
{
   auto slices = distribute( p, nranks );
   std::vector<BlockProblem> out( nranks );
   std::vector<RankStack> stacks( nranks );
   std::vector<PresolveStatus> status( nranks );
   ReductionCounters counters;
   run_ranks( nranks, ExecMode::Lockstep, [&]( Communicator& comm ) {
      const int r = comm.rank();
      PresolveContext ctx;
      ctx.cfg = cfg;
      ctx.comm = &comm;
      ctx.ws = make_workspace( slices[r], r, nranks, gid_layout( slices[r], comm ) );
      ctx.tracking = Tracking::compute_from_scratch( ctx.ws, comm );
      body( ctx );
      ctx.sync();
      ctx.ws.compact();
      out[r] = extract_slice( ctx.ws );
      stacks[r] = ctx.stack;
      status[r] = ctx.status;
      auto global = ctx.counters.global( comm, "test-counters" );
      if( r == 0 )
         counters = global;
   } );
   StepResult res;
   res.status = *std::max_element( status.begin(), status.end() );
   res.problem = gather( out );
   res.counters = counters;
   res.stacks = std::move( stacks );
   return res;
}

inline StepResult run_step( const BlockProblem& p, Presolver presolver, int nranks = 1, PresolveConfig cfg = {} )
{
   return run_steps(
      p, nranks,
      [presolver]( PresolveContext& ctx ) {
         ctx.current = presolver;
         detail::call_presolver( ctx, presolver );
      },
      cfg );
}

struct RoundTrip
{
   PresolveRun run;
   MonolithicLP original, reduced;
   OracleResult reduced_result;
   PostsolveResult post;
};

/// Presolve, oracle solve of the reduced problem and postsolve. `post` is
/// left empty unless presolve succeeds and the reduced problem is optimal.
inline RoundTrip round_trip( const BlockProblem& p, int nranks = 1, PresolveConfig cfg = {},
                             ExecMode mode = ExecMode::Lockstep )
{
   RoundTrip rt;
   rt.original = assemble_monolithic( p ).first;
   rt.run = presolve( p, cfg, nranks, mode );
   if( rt.run.status != PresolveStatus::Ok )
      return rt;
   rt.reduced = rt.run.reduced_lp();
   rt.reduced_result = solve_reference( rt.reduced );
   if( rt.reduced_result.status != OracleStatus::Optimal )
      return rt;
   rt.post = postsolve( rt.run.stacks, rt.run.ids.cols, rt.run.ids.rows, rt.reduced, rt.reduced_result.solution,
                        rt.original, mode );
   return rt;
}

/// Configuration with every presolver disabled except `keep`.
inline PresolveConfig only( std::initializer_list<Presolver> keep )
{
   PresolveConfig cfg;
   for( std::size_t k = 0; k < kNumPresolvers; ++k )
      cfg.disabled.insert( static_cast<Presolver>( k ) );
   for( Presolver p : keep )
      cfg.disabled.erase( p );
   return cfg;
}

} // namespace ahlp::test

#endif
