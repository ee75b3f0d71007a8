#include "ahlp/generator/generator.hpp"
#include "ahlp/io/blocks.hpp"
#include "ahlp/io/solution_file.hpp"
#include "ahlp/io/stats.hpp"
#include "ahlp/oracle/simplex.hpp"
#include "ahlp/postsolve/postsolve.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace ahlp;

namespace
{

enum Exit : int
{
   kOk = 0,
   kUsage = 1,
   kParse = 2,
   kInfeasible = 3,
   kUnbounded = 4,
   kVerifyFailed = 5,
   kInternal = 6,
   kIo = 7
};

struct Options
{
   std::string mps, blk, out, stats, stack, solution;
   int ranks = 1;
   std::string mode = "lockstep";
   int max_rounds = PresolveConfig{}.max_rounds;
   double feastol = PresolveConfig{}.feastol;
   double threshold = PresolveConfig{}.threshold;
   std::vector<std::string> disable;
   bool validate = false;
   bool table = false;
   GenSpec gen;
};

class Failure : public std::runtime_error
{
 public:
   Failure( int code, const std::string& msg ) : std::runtime_error( msg ), code( code ) {}
   int code;
};

void add_presolve_options( CLI::App* c, Options& o )
{
   c->add_option( "--mps", o.mps, "input MPS file" )->required()->envname( "AHLP_MPS" );
   c->add_option( "--blocks", o.blk, "block annotation file" )->required()->envname( "AHLP_BLOCKS" );
   c->add_option( "--ranks", o.ranks, "number of logical ranks" )->envname( "AHLP_RANKS" )->check( CLI::PositiveNumber );
   c->add_option( "--mode", o.mode, "lockstep or threaded" )
      ->envname( "AHLP_MODE" )
      ->check( CLI::IsMember( { "lockstep", "threaded" } ) );
   c->add_option( "--max-rounds", o.max_rounds, "presolve round limit" )->envname( "AHLP_MAX_ROUNDS" );
   c->add_option( "--feastol", o.feastol, "feasibility tolerance" )->envname( "AHLP_FEASTOL" );
   c->add_option( "--threshold", o.threshold, "continuation threshold" )->envname( "AHLP_THRESHOLD" );
   c->add_option( "--disable", o.disable, "presolver to skip (repeatable)" )
      ->envname( "AHLP_DISABLE" )
      ->delimiter( ',' );
   c->add_flag( "--validate", o.validate, "check the block structure after every presolver call" )
      ->envname( "AHLP_VALIDATE" );
}

PresolveConfig make_config( const Options& o )
{
   PresolveConfig cfg;
   cfg.max_rounds = o.max_rounds;
   cfg.feastol = o.feastol;
   cfg.threshold = o.threshold;
   cfg.validate_each_step = o.validate;
   try
   {
      for( const auto& d : o.disable )
         cfg.disabled.insert( presolver_from_string( d ) );
      cfg.check();
   }
   catch( const std::invalid_argument& e )
   {
      throw Failure( kUsage, e.what() );
   }
   return cfg;
}

ExecMode make_mode( const Options& o ) { return o.mode == "threaded" ? ExecMode::Threaded : ExecMode::Lockstep; }

BlockProblem load( const Options& o )
{
   std::ifstream probe_mps( o.mps ), probe_blk( o.blk );
   if( !probe_mps )
      throw Failure( kIo, "cannot open " + o.mps );
   if( !probe_blk )
      throw Failure( kIo, "cannot open " + o.blk );
   return read_problem( o.mps, o.blk );
}

int fold_ranks( const Options& o, const BlockProblem& p )
{
   if( o.ranks > p.num_blocks )
   {
      std::cerr << "note: " << o.ranks << " ranks requested for " << p.num_blocks << " blocks, using "
                << p.num_blocks << "\n";
      return p.num_blocks;
   }
   return o.ranks;
}

int status_exit( PresolveStatus s ) { return s == PresolveStatus::Infeasible ? kInfeasible : kUnbounded; }

int cmd_presolve( const Options& o )
{
   const auto p = load( o );
   const auto cfg = make_config( o );
   const int nranks = fold_ranks( o, p );
   auto run = presolve( p, cfg, nranks, make_mode( o ) );
   auto stats = make_stats( run, o.mps );
   const std::string stats_path = o.stats.empty() ? o.out + ".stats.json" : o.stats;
   write_stats( stats, stats_path );
   if( run.status != PresolveStatus::Ok )
   {
      std::cout << to_string( run.status ) << ": " << run.message << "\n";
      return status_exit( run.status );
   }
   for( const auto& v : run.violations )
      std::cerr << "structure violation: " << v << "\n";
   auto [lp, asg] = assemble_monolithic( run.reduced );
   write_mps( lp, o.out + ".mps" );
   write_blocks( lp, asg, o.out + ".blk" );
   write_stack_file( { run.stacks, run.ids }, o.out + ".stack.json" );
   std::printf( "rounds %d, ranks %d, rows %lld -> %lld, cols %lld -> %lld, nonzeros %lld -> %lld\n", run.rounds,
                run.nranks, static_cast<long long>( run.original.rows ), static_cast<long long>( run.reduced_size.rows ),
                static_cast<long long>( run.original.cols ), static_cast<long long>( run.reduced_size.cols ),
                static_cast<long long>( run.original.nonzeros ), static_cast<long long>( run.reduced_size.nonzeros ) );
   if( o.table )
      std::cout << table_header() << "\n" << table_row( stats ) << "\n";
   return run.violations.empty() ? kOk : kInternal;
}

int cmd_verify( const Options& o )
{
   const auto p = load( o );
   const auto cfg = make_config( o );
   const int nranks = fold_ranks( o, p );
   const auto original = assemble_monolithic( p ).first;
   auto run = presolve( p, cfg, nranks, make_mode( o ) );
   if( run.status != PresolveStatus::Ok )
   {
      std::cout << to_string( run.status ) << ": " << run.message << "\n";
      return status_exit( run.status );
   }
   StackFile post{ run.stacks, run.ids };
   if( !o.stack.empty() )
      post = read_stack_file( o.stack );
   const auto reduced = run.reduced_lp();
   OracleResult sol;
   try
   {
      sol = solve_reference( reduced );
   }
   catch( const OracleRefused& e )
   {
      throw Failure( kUsage, std::string( "refusing to verify: " ) + e.what() );
   }
   if( sol.status != OracleStatus::Optimal )
   {
      std::cout << "reduced problem is " << to_string( sol.status ) << "\n";
      return sol.status == OracleStatus::Infeasible ? kInfeasible : kUnbounded;
   }
   auto res = postsolve( post.stacks, post.ids.cols, post.ids.rows, reduced, sol.solution, original, make_mode( o ) );
   std::printf( "ranks %d, reduced optimum %.12g, original objective %.12g\n", run.nranks, sol.value,
                res.report.primal_objective );
   std::printf( "kkt: primal %.3e, dual %.3e, complementarity %.3e, gap %.3e\n", res.report.primal, res.report.dual,
                res.report.complementarity, res.report.gap );
   if( !o.solution.empty() )
      write_solution( original, res.solution, o.solution );
   const bool ok = res.report.ok( 1e-6 );
   std::cout << ( ok ? "verified" : "verification failed" ) << "\n";
   return ok ? kOk : kVerifyFailed;
}

int cmd_generate( const Options& o )
{
   try
   {
      o.gen.check();
   }
   catch( const InvalidProblem& e )
   {
      throw Failure( kUsage, e.what() );
   }
   auto g = generate( o.gen );
   auto [lp, asg] = assemble_monolithic( g.problem );
   lp.name = "gen" + std::to_string( o.gen.seed );
   write_mps( lp, o.out + ".mps" );
   write_blocks( lp, asg, o.out + ".blk" );
   std::ofstream man( o.out + ".manifest.json" );
   if( !man )
      throw Failure( kIo, "cannot write " + o.out + ".manifest.json" );
   man << nlohmann::json( g.manifest ).dump( 2 ) << "\n";
   std::printf( "wrote %s.mps, %s.blk, %s.manifest.json (%zu planted items)\n", o.out.c_str(), o.out.c_str(),
                o.out.c_str(), g.manifest.items.size() );
   return kOk;
}

int run_guarded( const std::function<int()>& f )
{
   try
   {
      return f();
   }
   catch( const Failure& e )
   {
      std::cerr << "error: " << e.what() << "\n";
      return e.code;
   }
   catch( const ParseError& e )
   {
      std::cerr << "parse error: " << e.what() << "\n";
      return kParse;
   }
   catch( const InvalidProblem& e )
   {
      std::cerr << "invalid problem: " << e.what() << "\n";
      return kParse;
   }
   catch( const StackCorruption& e )
   {
      std::cerr << "internal fault: " << e.what() << "\n";
      return kInternal;
   }
   catch( const ProtocolFault& e )
   {
      std::cerr << "internal fault: " << e.what() << "\n";
      return kInternal;
   }
   catch( const ContractViolation& e )
   {
      std::cerr << "internal fault: " << e.what() << "\n";
      return kInternal;
   }
   catch( const std::exception& e )
   {
      std::cerr << "error: " << e.what() << "\n";
      return kIo;
   }
}

} // namespace

int main( int argc, char** argv )
{
   CLI::App app{ "Structure-preserving presolve and postsolve for arrowhead LPs" };
   app.require_subcommand( 1 );
   Options o;

   auto* pre = app.add_subcommand( "presolve", "presolve an annotated MPS problem" );
   add_presolve_options( pre, o );
   pre->add_option( "--out", o.out, "output prefix for .mps, .blk, .stack.json" )->required()->envname( "AHLP_OUT" );
   pre->add_option( "--stats", o.stats, "statistics JSON path (default <out>.stats.json)" )->envname( "AHLP_STATS" );
   pre->add_flag( "--table", o.table, "print a reduced-size table line" );

   auto* ver = app.add_subcommand( "verify", "presolve, solve the reduced problem, postsolve and check KKT" );
   add_presolve_options( ver, o );
   ver->add_option( "--stack", o.stack, "postsolve stack file to use instead of the in-memory stacks" )
      ->envname( "AHLP_STACK" );
   ver->add_option( "--solution", o.solution, "write the recovered solution here" )->envname( "AHLP_SOLUTION" );

   auto* gen = app.add_subcommand( "generate", "write a seeded synthetic instance" );
   auto& g = o.gen;
   gen->add_option( "--out", o.out, "output prefix" )->required()->envname( "AHLP_OUT" );
   gen->add_option( "--seed", g.seed, "random seed" )->envname( "AHLP_SEED" );
   gen->add_option( "--blocks", g.blocks, "number of blocks" )->envname( "AHLP_GEN_BLOCKS" );
   gen->add_option( "--rows", g.rows, "local rows per block" )->envname( "AHLP_GEN_ROWS" );
   gen->add_option( "--cols", g.cols, "local columns per block" )->envname( "AHLP_GEN_COLS" );
   gen->add_option( "--link-rows", g.link_rows, "linking rows" )->envname( "AHLP_GEN_LINK_ROWS" );
   gen->add_option( "--link-cols", g.link_cols, "linking columns" )->envname( "AHLP_GEN_LINK_COLS" );
   gen->add_option( "--zero-rows", g.zero_rows, "rows of the zero block" )->envname( "AHLP_GEN_ZERO_ROWS" );
   gen->add_option( "--density", g.density, "entry density" )->envname( "AHLP_GEN_DENSITY" );
   gen->add_option( "--eq-fraction", g.eq_fraction, "fraction of equality rows" )->envname( "AHLP_GEN_EQ_FRACTION" );
   gen->add_option( "--plant-duplicates", g.duplicates, "fraction of parallel rows" )
      ->envname( "AHLP_GEN_DUPLICATES" );
   gen->add_option( "--plant-singletons", g.singletons, "fraction of singleton rows" )
      ->envname( "AHLP_GEN_SINGLETONS" );
   gen->add_option( "--plant-empty", g.empty, "fraction of empty columns" )->envname( "AHLP_GEN_EMPTY" );
   gen->add_option( "--plant-fixed", g.fixed, "fraction of fixed columns" )->envname( "AHLP_GEN_FIXED" );
   gen->add_option( "--plant-dependent", g.dependent, "fraction of dependent rows" )
      ->envname( "AHLP_GEN_DEPENDENT" );
   gen->add_option( "--plant-misplaced", g.misplaced, "fraction of misplaced rows and columns" )
      ->envname( "AHLP_GEN_MISPLACED" );
   gen->add_flag( "--infeasible", g.infeasible, "plant an infeasibility" )->envname( "AHLP_GEN_INFEASIBLE" );
   gen->add_option( "--bound-range", g.bound_range, "width of variable boxes" )->envname( "AHLP_GEN_BOUND_RANGE" );

   try
   {
      app.parse( argc, argv );
   }
   catch( const CLI::CallForHelp& e )
   {
      return app.exit( e );
   }
   catch( const CLI::ParseError& e )
   {
      app.exit( e );
      return kUsage;
   }

   if( pre->parsed() )
      return run_guarded( [&] { return cmd_presolve( o ); } );
   if( ver->parsed() )
      return run_guarded( [&] { return cmd_verify( o ); } );
   return run_guarded( [&] { return cmd_generate( o ); } );
}
