#ifndef AHLP_IO_SOLUTION_FILE_HPP
#define AHLP_IO_SOLUTION_FILE_HPP

#include "ahlp/io/mps.hpp"
#include "ahlp/postsolve/solution.hpp"
#include "ahlp/postsolve/stack.hpp"
#include "ahlp/presolve/engine.hpp"

#include <json.hpp>

namespace ahlp
{

/// Text solution file. Sections `[primal]` (name x), `[equality duals]`
/// (name y), `[inequality duals]` (name z+ z-) and `[bound duals]`
/// (name gamma phi), preceded by an `objective <value>` line.
inline void write_solution( const MonolithicLP& lp, const PrimalDualSolution& s, std::ostream& out )
{
   using detail::format_real;
   Real obj = lp.objective_offset;
   for( Index j = 0; j < lp.ncols(); ++j )
      obj += lp.c[j] * s.x[j];
   out << "objective " << format_real( obj ) << "\n[primal]\n";
   for( Index j = 0; j < lp.ncols(); ++j )
      out << lp.col_names[j] << " " << format_real( s.x[j] ) << "\n";
   out << "[equality duals]\n";
   for( Index i = 0; i < lp.neq(); ++i )
      out << lp.eq_names[i] << " " << format_real( s.y[i] ) << "\n";
   out << "[inequality duals]\n";
   for( Index i = 0; i < lp.nineq(); ++i )
      out << lp.ineq_names[i] << " " << format_real( s.zplus[i] ) << " " << format_real( s.zminus[i] ) << "\n";
   out << "[bound duals]\n";
   for( Index j = 0; j < lp.ncols(); ++j )
      out << lp.col_names[j] << " " << format_real( s.gamma[j] ) << " " << format_real( s.phi[j] ) << "\n";
}

inline void write_solution( const MonolithicLP& lp, const PrimalDualSolution& s, const std::string& path )
{
   std::ofstream out( path );
   if( !out )
      throw std::runtime_error( "cannot write " + path );
   write_solution( lp, s, out );
   if( !out )
      throw std::runtime_error( "write failed for " + path );
}

inline PrimalDualSolution read_solution( const MonolithicLP& lp, std::istream& in, const std::string& file = "<stream>" )
{
   PrimalDualSolution s;
   s.resize( lp.ncols(), lp.neq(), lp.nineq() );
   auto index = []( const std::vector<std::string>& names ) {
      std::unordered_map<std::string, Index> m;
      for( Index k = 0; k < static_cast<Index>( names.size() ); ++k )
         m[names[k]] = k;
      return m;
   };
   const auto cols = index( lp.col_names ), eqs = index( lp.eq_names ), ineqs = index( lp.ineq_names );
   std::string line, section;
   int lineno = 0;
   auto fail = [&]( const std::string& msg ) { throw ParseError( file, lineno, msg ); };
   auto num = [&]( const std::string& t ) {
      char* end = nullptr;
      const Real v = std::strtod( t.c_str(), &end );
      if( end == t.c_str() || *end != '\0' )
         fail( "invalid number '" + t + "'" );
      return v;
   };
   auto find = [&]( const std::unordered_map<std::string, Index>& m, const std::string& name ) {
      auto it = m.find( name );
      if( it == m.end() )
         fail( "unknown name '" + name + "'" );
      return it->second;
   };
   while( std::getline( in, line ) )
   {
      ++lineno;
      if( line.empty() )
         continue;
      if( line.front() == '[' )
      {
         section = line;
         continue;
      }
      auto tok = detail::split_ws( line );
      if( section.empty() )
      {
         if( tok.size() != 2 || tok[0] != "objective" )
            fail( "expected objective line" );
         continue;
      }
      const bool pair = section == "[inequality duals]" || section == "[bound duals]";
      if( tok.size() != ( pair ? 3u : 2u ) )
         fail( "malformed line" );
      if( section == "[primal]" )
         s.x[find( cols, tok[0] )] = num( tok[1] );
      else if( section == "[equality duals]" )
         s.y[find( eqs, tok[0] )] = num( tok[1] );
      else if( section == "[inequality duals]" )
      {
         const Index i = find( ineqs, tok[0] );
         s.zplus[i] = num( tok[1] );
         s.zminus[i] = num( tok[2] );
      }
      else if( section == "[bound duals]" )
      {
         const Index j = find( cols, tok[0] );
         s.gamma[j] = num( tok[1] );
         s.phi[j] = num( tok[2] );
      }
      else
         fail( "unknown section " + section );
   }
   return s;
}

/// Postsolve data of a presolve run: per-rank stacks plus the global ids of
/// the reduced columns and rows.
struct StackFile
{
   std::vector<RankStack> stacks;
   ReducedIds ids;
};

inline nlohmann::json to_json( const StackFile& f )
{
   auto stacks = nlohmann::json::array();
   for( const auto& s : f.stacks )
      stacks.push_back( to_json( s ) );
   return { { "format", "ahlp-postsolve-1" },
            { "reduced_cols", f.ids.cols },
            { "reduced_rows", f.ids.rows },
            { "reduced_num_eq", f.ids.num_eq },
            { "stacks", stacks } };
}

inline StackFile stack_file_from_json( const nlohmann::json& j )
{
   try
   {
      if( j.at( "format" ) != "ahlp-postsolve-1" )
         throw StackCorruption( "unknown stack file format" );
      StackFile f;
      f.ids.cols = j.at( "reduced_cols" ).get<std::vector<std::int64_t>>();
      f.ids.rows = j.at( "reduced_rows" ).get<std::vector<std::int64_t>>();
      f.ids.num_eq = j.at( "reduced_num_eq" ).get<Index>();
      for( const auto& s : j.at( "stacks" ) )
         f.stacks.push_back( rank_stack_from_json( s ) );
      return f;
   }
   catch( const nlohmann::json::exception& e )
   {
      throw StackCorruption( std::string( "malformed stack file: " ) + e.what() );
   }
}

inline void write_stack_file( const StackFile& f, const std::string& path )
{
   std::ofstream out( path );
   if( !out )
      throw std::runtime_error( "cannot write " + path );
   out << to_json( f ).dump() << "\n";
   if( !out )
      throw std::runtime_error( "write failed for " + path );
}

inline StackFile read_stack_file( const std::string& path )
{
   std::ifstream in( path );
   if( !in )
      throw std::runtime_error( "cannot open " + path );
   nlohmann::json j;
   try
   {
      in >> j;
   }
   catch( const nlohmann::json::exception& e )
   {
      throw StackCorruption( std::string( "malformed stack file: " ) + e.what() );
   }
   return stack_file_from_json( j );
}

} // namespace ahlp

#endif
