import { boot } from './console.js'

boot()
