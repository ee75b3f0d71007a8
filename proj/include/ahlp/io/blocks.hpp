#ifndef AHLP_IO_BLOCKS_HPP
#define AHLP_IO_BLOCKS_HPP

#include "ahlp/io/mps.hpp"

#include <optional>

namespace ahlp
{

/// Rows of block i > 0 touching columns of a block j other than 0 and i, as
/// "row/column" pairs.
inline std::vector<std::string> assignment_violations( const MonolithicLP& lp, const BlockAssignment& a )
{
   std::vector<std::string> out;
   auto scan = [&]( const SparseMatrix& m, const std::vector<int>& owner, const std::vector<std::string>& names ) {
      for( Index i = 0; i < m.rows(); ++i )
      {
         const int o = owner[i];
         if( o == kLinkOwner )
            continue;
         for( Index j : m.row_cols( i ) )
         {
            const int c = a.col_owner[j];
            if( c != 0 && c != o )
               out.push_back( "(" + names[i] + ", " + lp.col_names[j] + ")" );
         }
      }
   };
   scan( lp.A, a.eq_owner, lp.eq_names );
   scan( lp.C, a.ineq_owner, lp.ineq_names );
   return out;
}

/// Reads a block annotation: `NBLOCKS <N>`, then `ROW <name> <0..N|L>` and
/// `COL <name> <0..N>` lines. Lines starting with `#` are comments.
inline BlockAssignment read_blocks( std::istream& in, const MonolithicLP& lp, const std::string& file = "<stream>" )
{
   std::unordered_map<std::string, std::pair<bool, Index>> rows;
   for( Index i = 0; i < lp.neq(); ++i )
      rows[lp.eq_names[i]] = { true, i };
   for( Index i = 0; i < lp.nineq(); ++i )
      rows[lp.ineq_names[i]] = { false, i };
   std::unordered_map<std::string, Index> cols;
   for( Index j = 0; j < lp.ncols(); ++j )
      cols[lp.col_names[j]] = j;

   BlockAssignment a;
   std::vector<std::optional<int>> eq( lp.neq() ), ineq( lp.nineq() ), col( lp.ncols() );
   int lineno = 0;
   bool header = false;
   auto fail = [&]( const std::string& msg ) { throw ParseError( file, lineno, msg ); };
   auto tag = [&]( const std::string& s, bool allow_link ) {
      if( allow_link && s == "L" )
         return kLinkOwner;
      int v = 0;
      auto res = std::from_chars( s.data(), s.data() + s.size(), v );
      if( res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 0 || v > a.num_blocks )
         fail( "tag '" + s + "' out of range" );
      return v;
   };

   std::string line;
   while( std::getline( in, line ) )
   {
      ++lineno;
      auto tok = detail::split_ws( line );
      if( tok.empty() || tok[0][0] == '#' )
         continue;
      if( !header )
      {
         if( tok.size() != 2 || tok[0] != "NBLOCKS" )
            fail( "expected NBLOCKS header" );
         auto res = std::from_chars( tok[1].data(), tok[1].data() + tok[1].size(), a.num_blocks );
         if( res.ec != std::errc() || res.ptr != tok[1].data() + tok[1].size() || a.num_blocks < 1 )
            fail( "invalid block count '" + tok[1] + "'" );
         header = true;
         continue;
      }
      if( tok.size() != 3 || ( tok[0] != "ROW" && tok[0] != "COL" ) )
         fail( "malformed annotation" );
      if( tok[0] == "ROW" )
      {
         auto it = rows.find( tok[1] );
         if( it == rows.end() )
            fail( "unknown row '" + tok[1] + "'" );
         auto& slot = it->second.first ? eq[it->second.second] : ineq[it->second.second];
         if( slot )
            fail( "duplicate annotation for row '" + tok[1] + "'" );
         slot = tag( tok[2], true );
      }
      else
      {
         auto it = cols.find( tok[1] );
         if( it == cols.end() )
            fail( "unknown column '" + tok[1] + "'" );
         if( col[it->second] )
            fail( "duplicate annotation for column '" + tok[1] + "'" );
         col[it->second] = tag( tok[2], false );
      }
   }
   if( !header )
      fail( "missing NBLOCKS header" );

   auto take = [&]( const std::vector<std::optional<int>>& src, const std::vector<std::string>& names,
                    std::vector<int>& dst, const char* what ) {
      for( std::size_t k = 0; k < src.size(); ++k )
      {
         if( !src[k] )
            fail( std::string( "missing annotation for " ) + what + " '" + names[k] + "'" );
         dst.push_back( *src[k] );
      }
   };
   take( eq, lp.eq_names, a.eq_owner, "row" );
   take( ineq, lp.ineq_names, a.ineq_owner, "row" );
   take( col, lp.col_names, a.col_owner, "column" );
   number_assignment( a );

   if( auto bad = assignment_violations( lp, a ); !bad.empty() )
   {
      std::string msg = "annotation breaks the block structure at";
      for( std::size_t k = 0; k < bad.size() && k < 20; ++k )
         msg += " " + bad[k];
      if( bad.size() > 20 )
         msg += " and " + std::to_string( bad.size() - 20 ) + " more";
      throw InvalidProblem( msg );
   }
   return a;
}

inline BlockAssignment read_blocks( const std::string& path, const MonolithicLP& lp )
{
   std::ifstream in( path );
   if( !in )
      throw std::runtime_error( "cannot open " + path );
   return read_blocks( in, lp, path );
}

inline void write_blocks( const MonolithicLP& lp, const BlockAssignment& a, std::ostream& out )
{
   auto t = []( int o ) { return o == kLinkOwner ? std::string( "L" ) : std::to_string( o ); };
   out << "NBLOCKS " << a.num_blocks << "\n";
   for( Index i = 0; i < lp.neq(); ++i )
      out << "ROW " << lp.eq_names[i] << " " << t( a.eq_owner[i] ) << "\n";
   for( Index i = 0; i < lp.nineq(); ++i )
      out << "ROW " << lp.ineq_names[i] << " " << t( a.ineq_owner[i] ) << "\n";
   for( Index j = 0; j < lp.ncols(); ++j )
      out << "COL " << lp.col_names[j] << " " << a.col_owner[j] << "\n";
}

inline void write_blocks( const MonolithicLP& lp, const BlockAssignment& a, const std::string& path )
{
   std::ofstream out( path );
   if( !out )
      throw std::runtime_error( "cannot write " + path );
   write_blocks( lp, a, out );
   if( !out )
      throw std::runtime_error( "write failed for " + path );
}

/// Reads an MPS file and its annotation into block form.
inline BlockProblem read_problem( const std::string& mps, const std::string& blk )
{
   const auto lp = read_mps( mps );
   return split( lp, read_blocks( blk, lp ) );
}

} // namespace ahlp

#endif
