#ifndef AHLP_IO_STATS_HPP
#define AHLP_IO_STATS_HPP

#include "ahlp/presolve/engine.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>

namespace ahlp
{

struct StatsReport
{
   std::string instance;
   std::string status = "ok";
   std::string message;
   int ranks = 1;
   int rounds = 0;
   Real seconds = 0;
   SizeCounts original, reduced;
   ReductionCounters counters;
   std::map<std::string, Real> presolver_seconds;
};

inline StatsReport make_stats( const PresolveRun& run, const std::string& instance )
{
   StatsReport r;
   r.instance = instance;
   r.status = to_string( run.status );
   r.message = run.message;
   r.ranks = run.nranks;
   r.rounds = run.rounds;
   r.seconds = run.seconds;
   r.original = run.original;
   r.reduced = run.reduced_size;
   r.counters = run.counters;
   for( const auto& [name, t] : run.timings )
      r.presolver_seconds[name] += t;
   return r;
}

/// reduced / original * 100, or 100 when the original is empty.
inline Real percentage( std::int64_t reduced, std::int64_t original )
{
   return original == 0 ? 100.0 : 100.0 * static_cast<Real>( reduced ) / static_cast<Real>( original );
}

inline nlohmann::json to_json( const StatsReport& r )
{
   auto size = []( const SizeCounts& s ) {
      return nlohmann::json{ { "rows", s.rows }, { "cols", s.cols }, { "nonzeros", s.nonzeros } };
   };
   nlohmann::json presolvers = nlohmann::json::object();
   for( std::size_t k = 0; k < kNumPresolvers; ++k )
   {
      const Tally& t = r.counters.by_presolver[k];
      presolvers[to_string( static_cast<Presolver>( k ) )] = { { "rows_deleted", t.rows_deleted },
                                                               { "cols_deleted", t.cols_deleted },
                                                               { "entries_deleted", t.entries_deleted },
                                                               { "bounds_tightened", t.bounds_tightened },
                                                               { "vars_fixed", t.vars_fixed },
                                                               { "rows_moved", t.rows_moved },
                                                               { "cols_moved", t.cols_moved } };
   }
   return { { "instance", r.instance },
            { "status", r.status },
            { "message", r.message },
            { "ranks", r.ranks },
            { "rounds", r.rounds },
            { "seconds", r.seconds },
            { "original", size( r.original ) },
            { "reduced", size( r.reduced ) },
            { "rows_pct", percentage( r.reduced.rows, r.original.rows ) },
            { "cols_pct", percentage( r.reduced.cols, r.original.cols ) },
            { "nonzeros_pct", percentage( r.reduced.nonzeros, r.original.nonzeros ) },
            { "presolvers", presolvers },
            { "presolver_seconds", r.presolver_seconds } };
}

inline void write_stats( const StatsReport& r, const std::string& path )
{
   std::ofstream out( path );
   if( !out )
      throw std::runtime_error( "cannot write " + path );
   out << to_json( r ).dump( 2 ) << "\n";
   if( !out )
      throw std::runtime_error( "write failed for " + path );
}

inline std::string table_header()
{
   char buf[128];
   std::snprintf( buf, sizeof( buf ), "%-24s %10s %12s %15s", "instance", "time (s)", "nonzeros (%)", "constraints (%)" );
   return buf;
}

/// One line in the layout of the reduced problem size table.
inline std::string table_row( const StatsReport& r )
{
   char buf[256];
   std::snprintf( buf, sizeof( buf ), "%-24s %10.3f %12.2f %15.2f", r.instance.c_str(), r.seconds,
                  percentage( r.reduced.nonzeros, r.original.nonzeros ), percentage( r.reduced.rows, r.original.rows ) );
   return buf;
}

} // namespace ahlp

#endif
