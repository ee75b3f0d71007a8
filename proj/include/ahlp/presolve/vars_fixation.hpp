#ifndef AHLP_PRESOLVE_VARS_FIXATION_HPP
#define AHLP_PRESOLVE_VARS_FIXATION_HPP

#include "ahlp/presolve/context.hpp"

#include <cmath>

namespace ahlp
{

inline bool nearly_fixed( Real l, Real u, Real feastol )
{
   return is_finite( l ) && is_finite( u ) && u - l <= feastol * std::max<Real>( 1, std::fabs( l ) );
}

/// Removes columns whose bounds (nearly) coincide.
inline void vars_fixation( PresolveContext& ctx )
{
   auto& ws = ctx.ws;
   auto scan = [&]( bool local ) {
      auto& cols = local ? ws.local_cols : ws.link_cols;
      for( Index j = 0; j < static_cast<Index>( cols.size() ); ++j )
         if( cols[j].alive && nearly_fixed( cols[j].lower, cols[j].upper, ctx.cfg.feastol ) )
            ctx.fix_col( local ? ColKey::local( j ) : ColKey::link( j ), cols[j].lower );
   };
   scan( false );
   scan( true );
}

} // namespace ahlp

#endif
