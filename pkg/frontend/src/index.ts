export {
  loadBands,
  loadDos,
  loadFermi,
  loadPolytope,
  recomputeDigest,
  digestOf,
  SchemaError,
} from "./schema.js";
export type {
  BandsData,
  DosData,
  FermiData,
  PolytopeData,
  Emission,
} from "./schema.js";
export {
  renderBloch,
  renderDos,
  renderFermi,
  renderPolytope,
} from "./render.js";
export type { RenderOptions } from "./render.js";
export { main } from "./cli.js";
