export * from './tensorfile.js';
export * from './models.js';
export * from './train.js';
export * from './embeddings.js';
export * from './baselines.js';
export * from './gradcheck.js';
